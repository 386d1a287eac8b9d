#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evac/circuit.hpp"

namespace evac::analysis {

/// Three-qubit reduced FiLM model: N sublayers per entangler block, K
/// re-uploads of the epicenter angles on the two FiLM qubits, and a
/// single main qubit with four RY parameters and two RZ features.
struct MiniCircuitConfig {
    int N = 1;
    int K = 1;
    std::size_t observable_qubit = 1; ///< FiLM qubit read out for the Fourier series

    void validate() const;
    [[nodiscard]] std::size_t film_parameter_count() const noexcept {
        return static_cast<std::size_t>(2 * N * (K + 1));
    }
    [[nodiscard]] static constexpr std::size_t main_parameter_count() noexcept { return 4; }
    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return film_parameter_count() + main_parameter_count();
    }
};

/// Parameters: FiLM slots [0, n_p), main slots [n_p, n_p + 4).
/// Features: 0 = epicenter x, 1 = epicenter y, 2 and 3 = main inputs.
/// All three qubits are measured.
[[nodiscard]] qsim::Circuit mini_circuit(const MiniCircuitConfig &config);

/// c(wx, wy) for wx, wy in [-degree, degree] with
/// f(x, y) = sum c(wx, wy) exp(-i wx x) exp(-i wy y).
struct FourierTable {
    int degree = 0;
    std::vector<std::complex<double>> coeffs; ///< index (wx + d) * (2d + 1) + (wy + d)

    [[nodiscard]] std::complex<double> at(int wx, int wy) const;
    [[nodiscard]] std::size_t side() const noexcept { return static_cast<std::size_t>(2 * degree + 1); }
};

/// Samples f on a grid x round [0, 2pi)^2 and returns coefficients up to
/// `degree`. grid == 0 selects 2 * degree + 1; a coarser grid throws.
[[nodiscard]] FourierTable fourier_coefficients(const std::function<double(double, double)> &f, int degree,
                                                std::size_t grid = 0);

struct FourierOptions {
    int degree = -1;       ///< coefficients reported; -1 selects K
    std::size_t grid = 0;  ///< samples per axis; 0 selects 2 * degree + 1
    unsigned jobs = 1;
};

struct FourierSampling {
    MiniCircuitConfig config;
    int degree = 0;
    std::size_t grid = 0;
    std::vector<std::vector<double>> thetas;
    std::vector<FourierTable> tables;
};

/// Draws n_theta parameter vectors uniformly in [0, 2pi) and transforms the
/// observable qubit's <Z> as a function of the epicenter angles.
[[nodiscard]] FourierSampling sample_fourier(const MiniCircuitConfig &config, std::size_t n_theta,
                                             std::uint64_t seed, const FourierOptions &options = {});

/// Long-format CSV: sample,wx,wy,re,im,abs
[[nodiscard]] std::string fourier_violin_csv(const FourierSampling &sampling);

struct FisherMatrix {
    Eigen::MatrixXd F;
    int N = 0;
    int K = 0;
    std::size_t n_x = 0;
    std::size_t n_theta = 0;
    std::size_t clamped = 0; ///< probabilities raised to the floor
};

inline constexpr double kProbabilityFloor = 1e-12;

/// F = mean over x of sum_y (dP/dtheta_i)(dP/dtheta_j) / P for the selected
/// parameters, with joint basis-state probabilities and parameter-shift
/// derivatives.
[[nodiscard]] Eigen::MatrixXd circuit_fisher(const qsim::Circuit &circuit, std::span<const double> params,
                                             std::span<const std::vector<double>> xs,
                                             std::span<const std::size_t> selected, std::size_t *clamped = nullptr);

enum class FisherScope { Film, Full };

/// Average over n_theta uniform parameter draws, each with n_x fresh
/// N(0, 1) feature vectors used directly as angles.
[[nodiscard]] FisherMatrix fisher_matrix(const MiniCircuitConfig &config, std::size_t n_x, std::size_t n_theta,
                                         std::uint64_t seed, FisherScope scope = FisherScope::Film,
                                         unsigned jobs = 1);

struct SpectrumReport {
    std::vector<double> eigenvalues; ///< ascending
    std::size_t rank = 0;
    double near_zero_fraction = 0.0;
    std::vector<double> histogram_edges; ///< of eigenvalue / max eigenvalue
    std::vector<std::size_t> histogram;
};

inline constexpr double kRankTolerance = 1e-8;
inline constexpr double kNearZeroTolerance = 1e-3;

/// Throws ArgumentError for a non-square or non-symmetric matrix.
[[nodiscard]] SpectrumReport fisher_spectrum_report(const Eigen::MatrixXd &F, double rank_tol = kRankTolerance,
                                                    double near_zero_tol = kNearZeroTolerance,
                                                    std::size_t bins = 20);

/// ||off-diagonal blocks||_F / ||diagonal blocks||_F for the split at `split`,
/// which must lie in [1, n).
[[nodiscard]] double block_structure(const Eigen::MatrixXd &F, std::size_t split);

/// Long-format CSV: section,i,j,value with sections matrix, eigenvalue,
/// histogram and summary.
[[nodiscard]] std::string fisher_csv(const FisherMatrix &fisher, const SpectrumReport &report);

} // namespace evac::analysis
