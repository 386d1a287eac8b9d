#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evac/statevector.hpp"

namespace evac::qsim {

enum class GateKind : std::uint8_t { RX, RY, RZ, H, CNOT };

[[nodiscard]] bool is_rotation(GateKind kind) noexcept;
[[nodiscard]] const char *gate_name(GateKind kind) noexcept;

/// Where a rotation angle comes from: a literal, a trainable parameter slot
/// or an input feature slot. The resolved angle is scale * slot_value +
/// offset (offset alone for literals).
struct AngleRef {
    enum class Source : std::uint8_t { Constant, Parameter, Feature };

    Source source = Source::Constant;
    std::size_t index = 0;
    double scale = 1.0;
    double offset = 0.0;

    [[nodiscard]] static AngleRef constant(double value) { return {Source::Constant, 0, 0.0, value}; }
    [[nodiscard]] static AngleRef parameter(std::size_t index, double scale = 1.0) {
        return {Source::Parameter, index, scale, 0.0};
    }
    [[nodiscard]] static AngleRef feature(std::size_t index, double scale = 1.0) {
        return {Source::Feature, index, scale, 0.0};
    }
};

struct Gate {
    GateKind kind;
    std::size_t target;
    std::size_t control = 0; ///< CNOT only
    AngleRef angle{};        ///< rotations only
};

struct GateCensus {
    std::size_t rx = 0;
    std::size_t ry = 0;
    std::size_t rz = 0;
    std::size_t h = 0;
    std::size_t cx = 0;

    [[nodiscard]] std::size_t rotations() const noexcept { return rx + ry + rz; }
    [[nodiscard]] std::size_t total() const noexcept { return rx + ry + rz + h + cx; }
    friend bool operator==(const GateCensus &, const GateCensus &) = default;
};

/// Ordered gate list over a fixed register with a set of measured qubits.
class Circuit {
  public:
    explicit Circuit(std::size_t n_qubits);

    Circuit &rx(std::size_t q, AngleRef angle);
    Circuit &ry(std::size_t q, AngleRef angle);
    Circuit &rz(std::size_t q, AngleRef angle);
    Circuit &h(std::size_t q);
    Circuit &cnot(std::size_t control, std::size_t target);
    Circuit &measure(std::vector<std::size_t> qubits);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const std::vector<Gate> &gates() const noexcept { return gates_; }
    [[nodiscard]] const std::vector<std::size_t> &measured() const noexcept { return measured_; }
    /// One past the largest parameter slot referenced.
    [[nodiscard]] std::size_t parameter_count() const noexcept { return n_params_; }
    [[nodiscard]] std::size_t feature_count() const noexcept { return n_features_; }
    [[nodiscard]] GateCensus census() const noexcept;

    /// Throws InvariantError unless every parameter slot in
    /// [0, parameter_count) drives exactly one gate.
    void require_single_use_parameters() const;

  private:
    Circuit &rotation(GateKind kind, std::size_t q, AngleRef angle);
    void check_qubit(std::size_t q) const;

    std::size_t n_qubits_;
    std::vector<Gate> gates_;
    std::vector<std::size_t> measured_;
    std::size_t n_params_ = 0;
    std::size_t n_features_ = 0;
};

/// Throws BindingError when a referenced slot is missing.
[[nodiscard]] double resolve_angle(const AngleRef &angle, std::span<const double> params,
                                   std::span<const double> features);

/// Applies one gate at an explicit angle (ignored for H/CNOT).
void apply_gate(StateVector &state, const Gate &gate, double angle);
void apply_gate(StateVector &state, const Gate &gate, std::span<const double> params,
                std::span<const double> features);

/// Runs gates [first, end) on `state`. When shift_gate is in range, that
/// gate's angle is offset by shift_delta.
void run(const Circuit &circuit, StateVector &state, std::span<const double> params,
         std::span<const double> features, std::size_t first = 0,
         std::size_t shift_gate = static_cast<std::size_t>(-1), double shift_delta = 0.0);

[[nodiscard]] StateVector simulate(const Circuit &circuit, std::span<const double> params,
                                   std::span<const double> features);

/// State before every gate, plus the final state as the last element.
[[nodiscard]] std::vector<StateVector> simulate_prefixes(const Circuit &circuit, std::span<const double> params,
                                                         std::span<const double> features);

/// <Z> of each measured qubit.
[[nodiscard]] std::vector<double> expectations(const Circuit &circuit, std::span<const double> params,
                                               std::span<const double> features);
[[nodiscard]] std::vector<double> z_expectations(const StateVector &state, std::span<const std::size_t> qubits);

/// d<Z_m>/d param[index] for each measured qubit by the two-term shift rule,
/// summed over every gate the slot drives.
[[nodiscard]] std::vector<double> param_shift_grad(const Circuit &circuit, std::span<const double> params,
                                                   std::span<const double> features, std::size_t index);

/// d p(basis state)/d param[index] for every basis state, same rule.
[[nodiscard]] std::vector<double> param_shift_probability_grad(const Circuit &circuit,
                                                               std::span<const double> params,
                                                               std::span<const double> features,
                                                               std::size_t index);

/// Gradient of sum_k upstream[k] <Z_{measured[k]}> with respect to every
/// parameter slot, by one reverse sweep. Equal to contracting the
/// parameter-shift Jacobian with upstream. Optionally returns the <Z> values.
[[nodiscard]] std::vector<double> adjoint_vjp(const Circuit &circuit, std::span<const double> params,
                                              std::span<const double> features, std::span<const double> upstream,
                                              std::vector<double> *values = nullptr);

} // namespace evac::qsim
