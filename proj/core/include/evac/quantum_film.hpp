#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evac/circuit.hpp"
#include "evac/statevector.hpp"

namespace evac::qsim {

/// Shape of the quantum FiLM circuit: a small register re-uploading the
/// earthquake coordinates, a main register encoding the remaining features
/// one subvector at a time, a CNOT bridge from every FiLM qubit to every
/// main qubit, and a closing entangler layer on the main register.
struct QuantumFilmConfig {
    std::size_t n_film_qubits = 2;
    std::size_t n_main_qubits = 5;
    std::size_t bel_sublayers = 4;
    std::size_t film_reuploads = 5;
    std::size_t qdil_subvectors = 7;
    std::size_t repeats = 1;
    std::size_t main_features = 34;

    void validate() const;
    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_film_qubits + n_main_qubits; }
    [[nodiscard]] std::size_t film_parameter_count() const noexcept {
        return bel_sublayers * n_film_qubits * (film_reuploads + 1);
    }
    [[nodiscard]] std::size_t qdil_parameter_count() const noexcept {
        return bel_sublayers * n_main_qubits * (qdil_subvectors + 1);
    }
    [[nodiscard]] std::size_t final_parameter_count() const noexcept { return bel_sublayers * n_main_qubits; }
    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return film_parameter_count() + qdil_parameter_count() + final_parameter_count();
    }
    [[nodiscard]] std::size_t main_slot_count() const noexcept { return n_main_qubits * qdil_subvectors; }
};

/// Basic entangler layer on qubits [first, first + width): per sublayer an
/// RX on each qubit, then the CNOT ring q -> q+1 (mod width). Parameter
/// slot of (sublayer s, qubit q) is param_offset + s * width + q.
void append_bel(Circuit &circuit, std::size_t param_offset, std::size_t first_qubit, std::size_t width,
                std::size_t sublayers);

/// BEL over the whole register; thetas.size() must be a multiple of the
/// qubit count (sublayers * n_qubits).
void bel_layer(StateVector &state, std::span<const double> thetas);

/// Section circuits take angle-valued features multiplied by feature_scale.
[[nodiscard]] Circuit film_circuit(const QuantumFilmConfig &config, double feature_scale = 1.0);
[[nodiscard]] Circuit qdil_circuit(const QuantumFilmConfig &config, double feature_scale = 1.0);
/// Bridge CNOTs followed by the closing BEL on the full register.
[[nodiscard]] Circuit bridge_circuit(const QuantumFilmConfig &config);

/// Two-qubit FiLM state for angles already in [0, pi].
[[nodiscard]] StateVector film_section(double x_angle, double y_angle, std::span<const double> thetas,
                                       const QuantumFilmConfig &config = {});
/// Five-qubit main state; angles are zero-padded to the slot count.
[[nodiscard]] StateVector qdil_section(std::span<const double> angles, std::span<const double> thetas,
                                       const QuantumFilmConfig &config = {});

/// Features in [0, 1] enter the circuit as angles in [0, pi].
inline constexpr double kFeatureAngleScale = 3.141592653589793;

class QuantumFilm {
  public:
    explicit QuantumFilm(QuantumFilmConfig config = {});

    [[nodiscard]] const QuantumFilmConfig &config() const noexcept { return config_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return config_.parameter_count(); }
    [[nodiscard]] std::size_t output_count() const noexcept { return config_.n_main_qubits; }

    /// The whole model as one circuit. Feature slots: epicenter x, y, then
    /// the main features; angles are pi times the slot values.
    [[nodiscard]] const Circuit &circuit() const noexcept { return full_; }
    [[nodiscard]] std::vector<double> circuit_features(std::span<const double> main,
                                                       std::span<const double> epi) const;

    /// <Z> of each main qubit.
    [[nodiscard]] std::vector<double> forward(std::span<const double> main, std::span<const double> epi,
                                              std::span<const double> params) const;

    struct Evaluation {
        std::vector<double> values;
        /// d values[k] / d params[p] at jacobian[p * output_count() + k]
        std::vector<double> jacobian;
    };

    /// Forward pass and, optionally, the parameter-shift Jacobian. Shifted
    /// circuits are evaluated exactly; the product structure of the state
    /// before the bridge lets shifted sections share the bridge work.
    [[nodiscard]] Evaluation evaluate(std::span<const double> main, std::span<const double> epi,
                                      std::span<const double> params, bool with_jacobian) const;

    /// d(sum_k upstream[k] values[k]) / d params by a reverse sweep over
    /// circuit(); matches the shift-rule Jacobian contracted with upstream.
    [[nodiscard]] std::vector<double> vjp(std::span<const double> main, std::span<const double> epi,
                                          std::span<const double> params, std::span<const double> upstream) const;

  private:
    void check(std::span<const double> main, std::span<const double> epi, std::span<const double> params) const;

    QuantumFilmConfig config_;
    Circuit film_;
    Circuit qdil_;
    Circuit bridge_;
    Circuit full_;
    std::vector<std::size_t> main_qubits_;
};

/// Default-shaped model: 34 main features in [0,1], epicenter in [0,1]^2,
/// 228 parameters.
[[nodiscard]] std::vector<double> full_forward(std::span<const double> main, std::span<const double> epi,
                                               std::span<const double> params);

} // namespace evac::qsim
