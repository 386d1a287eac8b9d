#include "evac/circuit.hpp"

#include <algorithm>
#include <numbers>

#include "evac/error.hpp"

namespace evac::qsim {

bool is_rotation(GateKind kind) noexcept {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

const char *gate_name(GateKind kind) noexcept {
    switch (kind) {
    case GateKind::RX:
        return "rx";
    case GateKind::RY:
        return "ry";
    case GateKind::RZ:
        return "rz";
    case GateKind::H:
        return "h";
    case GateKind::CNOT:
        return "cx";
    }
    return "?";
}

Circuit::Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw ArgumentError("qubit count must lie in [1, 16]");
    }
}

void Circuit::check_qubit(std::size_t q) const {
    if (q >= n_qubits_) {
        throw ArgumentError("qubit index out of range");
    }
}

Circuit &Circuit::rotation(GateKind kind, std::size_t q, AngleRef angle) {
    check_qubit(q);
    if (angle.source == AngleRef::Source::Parameter) {
        n_params_ = std::max(n_params_, angle.index + 1);
    } else if (angle.source == AngleRef::Source::Feature) {
        n_features_ = std::max(n_features_, angle.index + 1);
    }
    gates_.push_back({kind, q, 0, angle});
    return *this;
}

Circuit &Circuit::rx(std::size_t q, AngleRef angle) { return rotation(GateKind::RX, q, angle); }
Circuit &Circuit::ry(std::size_t q, AngleRef angle) { return rotation(GateKind::RY, q, angle); }
Circuit &Circuit::rz(std::size_t q, AngleRef angle) { return rotation(GateKind::RZ, q, angle); }

Circuit &Circuit::h(std::size_t q) {
    check_qubit(q);
    gates_.push_back({GateKind::H, q, 0, {}});
    return *this;
}

Circuit &Circuit::cnot(std::size_t control, std::size_t target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw ArgumentError("CNOT control and target must differ");
    }
    gates_.push_back({GateKind::CNOT, target, control, {}});
    return *this;
}

Circuit &Circuit::measure(std::vector<std::size_t> qubits) {
    for (auto q : qubits) {
        check_qubit(q);
    }
    measured_ = std::move(qubits);
    return *this;
}

GateCensus Circuit::census() const noexcept {
    GateCensus c;
    for (const auto &g : gates_) {
        switch (g.kind) {
        case GateKind::RX:
            ++c.rx;
            break;
        case GateKind::RY:
            ++c.ry;
            break;
        case GateKind::RZ:
            ++c.rz;
            break;
        case GateKind::H:
            ++c.h;
            break;
        case GateKind::CNOT:
            ++c.cx;
            break;
        }
    }
    return c;
}

void Circuit::require_single_use_parameters() const {
    std::vector<int> uses(n_params_, 0);
    for (const auto &g : gates_) {
        if (is_rotation(g.kind) && g.angle.source == AngleRef::Source::Parameter) {
            ++uses[g.angle.index];
        }
    }
    for (std::size_t i = 0; i < uses.size(); ++i) {
        if (uses[i] != 1) {
            throw InvariantError("parameter slot " + std::to_string(i) + " is bound " +
                                 std::to_string(uses[i]) + " times");
        }
    }
}

double resolve_angle(const AngleRef &angle, std::span<const double> params, std::span<const double> features) {
    switch (angle.source) {
    case AngleRef::Source::Constant:
        return angle.offset;
    case AngleRef::Source::Parameter:
        if (angle.index >= params.size()) {
            throw BindingError("parameter slot " + std::to_string(angle.index) + " is unbound");
        }
        return angle.scale * params[angle.index] + angle.offset;
    case AngleRef::Source::Feature:
        if (angle.index >= features.size()) {
            throw BindingError("feature slot " + std::to_string(angle.index) + " is unbound");
        }
        return angle.scale * features[angle.index] + angle.offset;
    }
    return 0.0;
}

void apply_gate(StateVector &state, const Gate &gate, double angle) {
    switch (gate.kind) {
    case GateKind::RX:
        state.apply_rx(gate.target, angle);
        break;
    case GateKind::RY:
        state.apply_ry(gate.target, angle);
        break;
    case GateKind::RZ:
        state.apply_rz(gate.target, angle);
        break;
    case GateKind::H:
        state.apply_h(gate.target);
        break;
    case GateKind::CNOT:
        state.apply_cnot(gate.control, gate.target);
        break;
    }
}

void apply_gate(StateVector &state, const Gate &gate, std::span<const double> params,
                std::span<const double> features) {
    apply_gate(state, gate, is_rotation(gate.kind) ? resolve_angle(gate.angle, params, features) : 0.0);
}

void run(const Circuit &circuit, StateVector &state, std::span<const double> params,
         std::span<const double> features, std::size_t first, std::size_t shift_gate, double shift_delta) {
    if (state.n_qubits() != circuit.n_qubits()) {
        throw ArgumentError("state and circuit qubit counts differ");
    }
    const auto &gates = circuit.gates();
    for (std::size_t g = first; g < gates.size(); ++g) {
        const auto &gate = gates[g];
        double angle = is_rotation(gate.kind) ? resolve_angle(gate.angle, params, features) : 0.0;
        if (g == shift_gate) {
            angle += shift_delta;
        }
        apply_gate(state, gate, angle);
    }
}

StateVector simulate(const Circuit &circuit, std::span<const double> params, std::span<const double> features) {
    StateVector state(circuit.n_qubits());
    run(circuit, state, params, features);
    return state;
}

std::vector<StateVector> simulate_prefixes(const Circuit &circuit, std::span<const double> params,
                                           std::span<const double> features) {
    std::vector<StateVector> out;
    out.reserve(circuit.gates().size() + 1);
    StateVector state(circuit.n_qubits());
    for (const auto &gate : circuit.gates()) {
        out.push_back(state);
        apply_gate(state, gate, params, features);
    }
    out.push_back(std::move(state));
    return out;
}

std::vector<double> z_expectations(const StateVector &state, std::span<const std::size_t> qubits) {
    std::vector<double> out;
    out.reserve(qubits.size());
    for (auto q : qubits) {
        out.push_back(state.expectation_z(q));
    }
    return out;
}

std::vector<double> expectations(const Circuit &circuit, std::span<const double> params,
                                 std::span<const double> features) {
    return z_expectations(simulate(circuit, params, features), circuit.measured());
}

namespace {

template <typename Observe>
std::vector<double> shift_rule(const Circuit &circuit, std::span<const double> params,
                               std::span<const double> features, std::size_t index, std::size_t width,
                               Observe observe) {
    if (index >= circuit.parameter_count() || index >= params.size()) {
        throw ArgumentError("parameter index out of range");
    }
    constexpr double kShift = std::numbers::pi / 2.0;
    std::vector<double> grad(width, 0.0);
    const auto &gates = circuit.gates();
    for (std::size_t g = 0; g < gates.size(); ++g) {
        const auto &gate = gates[g];
        if (!is_rotation(gate.kind) || gate.angle.source != AngleRef::Source::Parameter ||
            gate.angle.index != index) {
            continue;
        }
        StateVector plus(circuit.n_qubits());
        run(circuit, plus, params, features, 0, g, kShift);
        StateVector minus(circuit.n_qubits());
        run(circuit, minus, params, features, 0, g, -kShift);
        const auto fp = observe(plus);
        const auto fm = observe(minus);
        for (std::size_t k = 0; k < width; ++k) {
            grad[k] += gate.angle.scale * 0.5 * (fp[k] - fm[k]);
        }
    }
    return grad;
}

} // namespace

std::vector<double> param_shift_grad(const Circuit &circuit, std::span<const double> params,
                                     std::span<const double> features, std::size_t index) {
    return shift_rule(circuit, params, features, index, circuit.measured().size(),
                      [&](const StateVector &s) { return z_expectations(s, circuit.measured()); });
}

std::vector<double> param_shift_probability_grad(const Circuit &circuit, std::span<const double> params,
                                                 std::span<const double> features, std::size_t index) {
    return shift_rule(circuit, params, features, index, std::size_t{1} << circuit.n_qubits(),
                      [](const StateVector &s) { return s.probabilities(); });
}

} // namespace evac::qsim

namespace evac::qsim {

namespace {

// Im <bra| P_q |ket> for P the generator of the rotation kind.
double generator_overlap_imag(const StateVector &bra, const StateVector &ket, GateKind kind, std::size_t q) {
    const auto bit = std::size_t{1} << (ket.n_qubits() - 1 - q);
    const auto b = bra.amplitudes();
    const auto k = ket.amplitudes();
    Amplitude acc{0.0, 0.0};
    for (std::size_t i = 0; i < k.size(); ++i) {
        const bool one = (i & bit) != 0;
        Amplitude pk;
        switch (kind) {
        case GateKind::RX:
            pk = k[i ^ bit];
            break;
        case GateKind::RY: // Y|0> = i|1>, Y|1> = -i|0>
            pk = one ? Amplitude{0.0, 1.0} * k[i ^ bit] : Amplitude{0.0, -1.0} * k[i ^ bit];
            break;
        default: // RZ
            pk = one ? -k[i] : k[i];
            break;
        }
        acc += std::conj(b[i]) * pk;
    }
    return acc.imag();
}

void apply_inverse(StateVector &state, const Gate &gate, double angle) { apply_gate(state, gate, -angle); }

} // namespace

std::vector<double> adjoint_vjp(const Circuit &circuit, std::span<const double> params,
                                std::span<const double> features, std::span<const double> upstream,
                                std::vector<double> *values) {
    const auto &measured = circuit.measured();
    if (upstream.size() != measured.size()) {
        throw ArgumentError("upstream gradient needs one entry per measured qubit");
    }
    if (params.size() < circuit.parameter_count()) {
        throw BindingError("circuit needs " + std::to_string(circuit.parameter_count()) + " parameters");
    }
    auto psi = simulate(circuit, params, features);
    if (values != nullptr) {
        *values = z_expectations(psi, measured);
    }
    // lambda = (sum_k u_k Z_k) psi
    auto lambda = psi;
    {
        auto amps = lambda.amplitudes();
        const auto src = psi.amplitudes();
        const auto n = circuit.n_qubits();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            double w = 0.0;
            for (std::size_t k = 0; k < measured.size(); ++k) {
                w += ((i >> (n - 1 - measured[k])) & 1U) ? -upstream[k] : upstream[k];
            }
            amps[i] = w * src[i];
        }
    }
    std::vector<double> grad(params.size(), 0.0);
    const auto &gates = circuit.gates();
    for (std::size_t g = gates.size(); g-- > 0;) {
        const auto &gate = gates[g];
        const double angle = is_rotation(gate.kind) ? resolve_angle(gate.angle, params, features) : 0.0;
        if (is_rotation(gate.kind) && gate.angle.source == AngleRef::Source::Parameter) {
            grad[gate.angle.index] +=
                gate.angle.scale * generator_overlap_imag(lambda, psi, gate.kind, gate.target);
        }
        if (gate.kind == GateKind::CNOT || gate.kind == GateKind::H) {
            apply_gate(psi, gate, 0.0);
            apply_gate(lambda, gate, 0.0);
        } else {
            apply_inverse(psi, gate, angle);
            apply_inverse(lambda, gate, angle);
        }
    }
    return grad;
}

} // namespace evac::qsim
