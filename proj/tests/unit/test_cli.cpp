#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "evac/checkpoint.hpp"
#include "evac/dataset.hpp"
#include "evac/dyngraph.hpp"
#include "evac/graph_io.hpp"

using namespace evac;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
  protected:
    fs::path dir;

    void SetUp() override {
        ::unsetenv("QRL_SEED");
        dir = fs::temp_directory_path() /
              ("evac_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override {
        ::unsetenv("QRL_SEED");
        fs::remove_all(dir);
    }
    std::string p(const std::string &name) const { return (dir / name).string(); }

    int run(std::vector<std::string> args) {
        out.str("");
        err.str("");
        return cli::run(args, out, err);
    }

    std::ostringstream out, err;
};

} // namespace

TEST_F(Cli, NoArgumentsPrintsHelpAndFails) {
    EXPECT_EQ(run({}), 2);
    EXPECT_NE(err.str().find("graph"), std::string::npos);
}

TEST_F(Cli, HelpSucceeds) {
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_EQ(run({"train", "--help"}), 0);
}

TEST_F(Cli, UnknownFlagIsUsageError) {
    EXPECT_EQ(run({"graph", "synth", "--rows", "3", "--cols", "3", "--seed", "1", "--bogus"}), 2);
    EXPECT_EQ(run({"frobnicate"}), 2);
    EXPECT_EQ(run({"graph", "synth", "--rows", "zero", "--cols", "3", "--seed", "1", "--out", p("g.json")}), 2);
}

TEST_F(Cli, GraphSynthRoundTrip) {
    ASSERT_EQ(run({"graph", "synth", "--rows", "4", "--cols", "5", "--seed", "3", "--out", p("g.json")}), 0)
        << err.str();
    EXPECT_EQ(load_graph(p("g.json")), synth_city(4, 5, 3));
}

TEST_F(Cli, SeedPrecedence) {
    write_text(p("cfg.json"), R"({"seed": 11})");
    ASSERT_EQ(run({"--config", p("cfg.json"), "graph", "synth", "--rows", "3", "--cols", "3", "--out", p("a.json")}),
              0);
    EXPECT_EQ(load_graph(p("a.json")), synth_city(3, 3, 11));
    ::setenv("QRL_SEED", "12", 1);
    ASSERT_EQ(run({"--config", p("cfg.json"), "graph", "synth", "--rows", "3", "--cols", "3", "--out", p("b.json")}),
              0);
    EXPECT_EQ(load_graph(p("b.json")), synth_city(3, 3, 12));
    ASSERT_EQ(run({"--config", p("cfg.json"), "graph", "synth", "--rows", "3", "--cols", "3", "--seed", "13", "--out",
                   p("c.json")}),
              0);
    EXPECT_EQ(load_graph(p("c.json")), synth_city(3, 3, 13));
    ::setenv("QRL_SEED", "x1", 1);
    EXPECT_EQ(run({"graph", "synth", "--rows", "3", "--cols", "3", "--out", p("d.json")}), 2);
    ::unsetenv("QRL_SEED");
    EXPECT_EQ(run({"graph", "synth", "--rows", "3", "--cols", "3", "--out", p("d.json")}), 2);
    EXPECT_NE(err.str().find("seed"), std::string::npos);
}

TEST_F(Cli, MissingFilesAreDomainErrors) {
    EXPECT_EQ(run({"eval", "--ckpt", p("nope.json"), "--graph", p("nope.json"), "--seed", "1", "--out", p("r.json")}),
              1);
    EXPECT_EQ(run({"--config", p("nope.json"), "graph", "synth", "--rows", "3", "--cols", "3", "--seed", "1", "--out",
                   p("g.json")}),
              1);
}

TEST_F(Cli, DatasetGenerationIsByteReproducible) {
    ASSERT_EQ(run({"graph", "synth", "--rows", "5", "--cols", "5", "--seed", "2", "--out", p("g.json")}), 0);
    ASSERT_EQ(run({"dataset", "generate", "--graph", p("g.json"), "--n", "6", "--seed", "4", "--out", p("a.jsonl")}), 0)
        << err.str();
    ASSERT_EQ(run({"--jobs", "3", "dataset", "generate", "--graph", p("g.json"), "--scenarios", "6", "--seed", "4",
                   "--out", p("b.jsonl")}),
              0);
    const auto a = read_text(p("a.jsonl"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, read_text(p("b.jsonl")));
    EXPECT_EQ(load_dataset(p("a.jsonl")).samples, generate_dataset(synth_city(5, 5, 2), 6, 4).samples);
}

TEST_F(Cli, EnvSimulateCsvHasOneRowPerStep) {
    ASSERT_EQ(run({"graph", "synth", "--rows", "3", "--cols", "3", "--seed", "2", "--out", p("g.json")}), 0);
    ASSERT_EQ(run({"env", "simulate", "--graph", p("g.json"), "--steps", "7", "--seed", "1", "--out", p("t.csv")}), 0)
        << err.str();
    const auto text = read_text(p("t.csv"));
    EXPECT_EQ(text.rfind("t,e0", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 8);
}

TEST_F(Cli, TrainEvalExportPipeline) {
    ASSERT_EQ(run({"graph", "synth", "--rows", "4", "--cols", "4", "--seed", "2", "--out", p("g.json")}), 0);
    ASSERT_EQ(run({"dataset", "generate", "--graph", p("g.json"), "--n", "10", "--seed", "1", "--out", p("d.jsonl")}),
              0);
    ASSERT_EQ(run({"train", "--data", p("d.jsonl"), "--out", p("c.json"), "--seed", "3", "--epochs", "2",
                   "--batch-size", "16", "--quantum-gradient", "adjoint", "--history", p("h.json")}),
              0)
        << err.str();
    const HybridModel model;
    const auto params = load_checkpoint(p("c.json"), model);
    EXPECT_FALSE(params.classical_only);
    EXPECT_EQ(load_json(p("h.json")).size(), 3u);

    ASSERT_EQ(run({"eval", "--ckpt", p("c.json"), "--graph", p("g.json"), "--scenarios", "5", "--seed", "9", "--out",
                   p("r.json"), "--csv", p("r.csv")}),
              0)
        << err.str();
    const auto report = load_json(p("r.json"));
    EXPECT_EQ(report["n_scenarios"], 5);
    EXPECT_TRUE(fs::exists(p("r.csv")));

    ASSERT_EQ(run({"export-qasm", "--ckpt", p("c.json"), "--data", p("d.jsonl"), "--index", "2", "--out", p("q.qasm")}),
              0)
        << err.str();
    const auto qasm = read_text(p("q.qasm"));
    EXPECT_EQ(qasm.rfind("OPENQASM 3.0;", 0), 0u);
    EXPECT_NE(qasm.find("qubit[7] q;"), std::string::npos);
    ASSERT_EQ(run({"qsim", "export", "--ckpt", p("c.json"), "--data", p("d.jsonl"), "--index", "2", "--out",
                   p("q2.qasm")}),
              0);
    EXPECT_EQ(qasm, read_text(p("q2.qasm")));
    EXPECT_EQ(run({"export-qasm", "--ckpt", p("c.json"), "--data", p("d.jsonl"), "--index", "100000", "--out",
                   p("q3.qasm")}),
              1);
}

TEST_F(Cli, ClassicalOnlyTraining) {
    ASSERT_EQ(run({"graph", "synth", "--rows", "4", "--cols", "4", "--seed", "2", "--out", p("g.json")}), 0);
    ASSERT_EQ(run({"dataset", "generate", "--graph", p("g.json"), "--n", "6", "--seed", "1", "--out", p("d.jsonl")}), 0);
    ASSERT_EQ(run({"train", "--data", p("d.jsonl"), "--out", p("c.json"), "--seed", "3", "--epochs", "1",
                   "--classical-only"}),
              0)
        << err.str();
    EXPECT_TRUE(load_checkpoint(p("c.json"), HybridModel{}).classical_only);
    EXPECT_EQ(run({"train", "--data", p("d.jsonl"), "--out", p("c2.json"), "--seed", "3", "--quantum-gradient",
                   "magic"}),
              2);
}

TEST_F(Cli, AnalyzeCommands) {
    ASSERT_EQ(run({"analyze", "fourier", "--N", "1", "--K", "2", "--samples", "3", "--seed", "1", "--out", p("f.csv")}),
              0)
        << err.str();
    EXPECT_EQ(read_text(p("f.csv")).rfind("sample,wx,wy,re,im,abs", 0), 0u);
    ASSERT_EQ(run({"analyze", "fisher", "--N", "1", "--K", "1", "--n-x", "4", "--n-theta", "2", "--seed", "1",
                   "--scope", "full", "--out", p("fi.csv")}),
              0)
        << err.str();
    EXPECT_NE(out.str().find("rank"), std::string::npos);
    EXPECT_EQ(run({"analyze", "fisher", "--N", "1", "--K", "1", "--seed", "1", "--scope", "half", "--out",
                   p("fi.csv")}),
              2);
}
