#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace evac::qsim {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 16;

/// Dense pure state of n qubits. Qubit 0 is the most significant bit of the
/// basis index, so tensor(a, b) puts a's qubits first.
class StateVector {
  public:
    /// |0...0>
    explicit StateVector(std::size_t n_qubits);
    /// Computational basis state |index>.
    static StateVector basis(std::size_t n_qubits, std::size_t index);
    static StateVector from_amplitudes(std::vector<Amplitude> amplitudes);
    static StateVector tensor(const StateVector &leading, const StateVector &trailing);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    [[nodiscard]] std::span<Amplitude> amplitudes() noexcept { return amps_; }
    [[nodiscard]] Amplitude operator[](std::size_t i) const { return amps_[i]; }

    void apply_rx(std::size_t q, double theta);
    void apply_ry(std::size_t q, double theta);
    void apply_rz(std::size_t q, double theta);
    void apply_h(std::size_t q);
    void apply_cnot(std::size_t control, std::size_t target);
    /// Row-major 2x2 unitary on one qubit.
    void apply_matrix(std::size_t q, const Amplitude (&m)[4]);
    /// Multiplies every amplitude by e^{i phi}.
    void apply_global_phase(double phi);

    [[nodiscard]] double squared_norm() const noexcept;
    [[nodiscard]] double expectation_z(std::size_t q) const;
    [[nodiscard]] std::vector<double> probabilities() const;

  private:
    [[nodiscard]] std::size_t mask(std::size_t q) const;

    std::size_t n_qubits_;
    std::vector<Amplitude> amps_;
};

/// Draws `shots` computational-basis measurements; counts per basis index.
[[nodiscard]] std::vector<std::size_t> sample_counts(const StateVector &state, std::size_t shots,
                                                     std::mt19937_64 &rng);
/// <Z_q> estimated from basis counts.
[[nodiscard]] double sampled_expectation_z(std::span<const std::size_t> counts, std::size_t n_qubits,
                                           std::size_t q);

} // namespace evac::qsim
