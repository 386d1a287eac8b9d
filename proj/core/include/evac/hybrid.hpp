#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "evac/dataset.hpp"
#include "evac/features.hpp"
#include "evac/neural.hpp"
#include "evac/quantum_film.hpp"

namespace evac {

enum class QuantumGradient {
    ParameterShift, ///< two shifted circuits per parameter
    Adjoint,        ///< one reverse sweep, same derivative
};

struct HybridConfig {
    FilmNetConfig net{};
    qsim::QuantumFilmConfig quantum{};
    double head_init = 0.05; ///< head weights start uniform in [-head_init, head_init]
};

/// Trainable state of the parallel hybrid network. The head maps the
/// concatenation (classical[5], quantum[5]) to 5 logits; columns 5..9 of
/// head_w form the quantum block. In classical-only mode the quantum
/// vector is empty and the quantum block stays zero.
struct HybridParams {
    std::vector<double> net;
    std::vector<double> quantum;
    std::vector<double> head_w; ///< row-major 5 x 10
    std::vector<double> head_b;
    bool classical_only = false;

    [[nodiscard]] std::size_t size() const noexcept {
        return net.size() + quantum.size() + head_w.size() + head_b.size();
    }
    /// Flat view in the order net, quantum, head_w, head_b.
    [[nodiscard]] std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    void zero();
    HybridParams &operator+=(const HybridParams &other);
    HybridParams &operator*=(double s);
    friend bool operator==(const HybridParams &, const HybridParams &) = default;
};

class HybridModel {
  public:
    explicit HybridModel(HybridConfig config = {});

    [[nodiscard]] const HybridConfig &config() const noexcept { return config_; }
    [[nodiscard]] const FilmNet &net() const noexcept { return net_; }
    [[nodiscard]] const qsim::QuantumFilm &quantum() const noexcept { return quantum_; }
    [[nodiscard]] std::size_t n_out() const noexcept { return config_.net.n_out; }
    [[nodiscard]] std::size_t head_cols() const noexcept { return 2 * n_out(); }

    [[nodiscard]] HybridParams init(std::uint64_t seed, bool classical_only = false) const;
    /// Zero-filled parameters with the right shapes.
    [[nodiscard]] HybridParams zeros(bool classical_only = false) const;
    void validate(const HybridParams &params) const;

    struct Output {
        std::vector<double> logits;
        std::vector<double> classical;
        std::vector<double> quantum; ///< zeros in classical-only mode
    };

    [[nodiscard]] Output forward(const HybridParams &params, const FeatureVector &features) const;
    [[nodiscard]] std::vector<double> logits(const HybridParams &params, const FeatureVector &features) const {
        return forward(params, features).logits;
    }

    /// Masked cross-entropy of one sample; adds its gradient into grad.
    /// dropout_rng == nullptr disables dropout.
    double loss_and_grad(const HybridParams &params, const Sample &sample, HybridParams &grad,
                         std::mt19937_64 *dropout_rng = nullptr,
                         QuantumGradient method = QuantumGradient::ParameterShift) const;
    [[nodiscard]] double loss(const HybridParams &params, const Sample &sample) const;

  private:
    HybridConfig config_;
    FilmNet net_;
    qsim::QuantumFilm quantum_;
};

/// ||W_q||_F / (||W_q||_F + ||W_c||_F) for a head of n_out rows and 2*n_out
/// columns, classical block first. Throws when the head is all zero.
[[nodiscard]] double primacy_alpha(std::span<const double> head_w, std::size_t n_out = kOutputCount);

} // namespace evac
