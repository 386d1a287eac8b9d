#pragma once

#include <span>
#include <string>

#include "evac/circuit.hpp"

namespace evac::qsim {

/// OpenQASM 3.0 text for a fully bound circuit: header, qubit/bit
/// declarations, one statement per gate, then one measurement per
/// measured qubit. Throws BindingError when a parameter or feature slot
/// has no value.
[[nodiscard]] std::string export_qasm3(const Circuit &circuit, std::span<const double> params,
                                       std::span<const double> features);

} // namespace evac::qsim
