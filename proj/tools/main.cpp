#include "cli.hpp"

int main(int argc, char **argv) { return evac::cli::run(argc, argv); }
