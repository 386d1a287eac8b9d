#include "evac/qasm.hpp"

#include <cmath>
#include <cstdio>

#include "evac/error.hpp"

namespace evac::qsim {

namespace {

std::string format_angle(double a) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", a);
    return buf;
}

} // namespace

std::string export_qasm3(const Circuit &circuit, std::span<const double> params, std::span<const double> features) {
    if (params.size() < circuit.parameter_count()) {
        throw BindingError("circuit needs " + std::to_string(circuit.parameter_count()) + " parameters, " +
                           std::to_string(params.size()) + " bound");
    }
    if (features.size() < circuit.feature_count()) {
        throw BindingError("circuit needs " + std::to_string(circuit.feature_count()) + " features, " +
                           std::to_string(features.size()) + " bound");
    }
    std::string out = "OPENQASM 3.0;\ninclude \"stdgates.inc\";\n";
    out += "qubit[" + std::to_string(circuit.n_qubits()) + "] q;\n";
    const auto &measured = circuit.measured();
    if (!measured.empty()) {
        out += "bit[" + std::to_string(measured.size()) + "] c;\n";
    }
    for (const auto &g : circuit.gates()) {
        const std::string name = gate_name(g.kind);
        if (g.kind == GateKind::CNOT) {
            out += name + " q[" + std::to_string(g.control) + "], q[" + std::to_string(g.target) + "];\n";
        } else if (is_rotation(g.kind)) {
            const double a = resolve_angle(g.angle, params, features);
            if (!std::isfinite(a)) {
                throw BindingError("non-finite angle in " + name + " gate");
            }
            out += name + "(" + format_angle(a) + ") q[" + std::to_string(g.target) + "];\n";
        } else {
            out += name + " q[" + std::to_string(g.target) + "];\n";
        }
    }
    for (std::size_t i = 0; i < measured.size(); ++i) {
        out += "c[" + std::to_string(i) + "] = measure q[" + std::to_string(measured[i]) + "];\n";
    }
    return out;
}

} // namespace evac::qsim
