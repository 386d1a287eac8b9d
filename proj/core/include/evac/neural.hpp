#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evac/features.hpp"

namespace evac {

/// Named slice of a flat parameter vector. Matrices are row-major, shape {out, in}.
struct TensorSpec {
    std::string name;
    std::vector<std::size_t> shape;
    std::size_t offset = 0;

    [[nodiscard]] std::size_t size() const noexcept;
};

struct FilmNetConfig {
    std::size_t n_in = kMainFeatureCount;
    std::size_t hidden = 100;
    std::size_t n_out = kOutputCount;
    std::size_t n_film = kFilmFeatureCount;
    double dropout = 0.5;

    void validate() const;
};

/// MLP with FiLM modulation of the second hidden layer:
///   h1 = relu(W1 x + b1), drop
///   h2 = relu(W2 h1 + b2)
///   m  = gamma(epi) * h2 + beta(epi), drop
///   out = W3 m + b3
class FilmNet {
  public:
    explicit FilmNet(FilmNetConfig config = {});

    [[nodiscard]] const FilmNetConfig &config() const noexcept { return config_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return n_params_; }
    [[nodiscard]] const std::vector<TensorSpec> &specs() const noexcept { return specs_; }
    [[nodiscard]] const TensorSpec &spec(const std::string &name) const;

    /// Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero biases,
    /// except the gamma bias which starts at 1 (identity modulation).
    void init(std::span<double> params, std::uint64_t seed) const;

    struct Cache {
        bool valid = false;
        std::vector<double> x, epi;
        std::vector<double> z1, h1, z2, h2, gamma, beta, m;
        std::vector<double> mask1, mask2; ///< dropout multipliers (0 or 1/(1-p))
    };

    /// dropout_rng == nullptr means eval mode (no dropout).
    [[nodiscard]] std::vector<double> forward(std::span<const double> params, std::span<const double> x,
                                              std::span<const double> epi, Cache *cache = nullptr,
                                              std::mt19937_64 *dropout_rng = nullptr) const;

    /// Adds dL/dparams into grad given dL/dout. Throws StateError without a
    /// valid cache.
    void backward(std::span<const double> params, const Cache &cache, std::span<const double> dout,
                  std::span<double> grad) const;

  private:
    void check_params(std::span<const double> params) const;

    FilmNetConfig config_;
    std::vector<TensorSpec> specs_;
    std::size_t n_params_ = 0;
    std::size_t w1_, b1_, w2_, b2_, wg_, bg_, wb_, bb_, w3_, b3_;
};

struct CrossEntropy {
    double loss = 0.0;
    std::vector<double> grad; ///< dL/dlogits, zero on masked entries
};

/// Softmax restricted to unmasked entries (mask[i] true = valid).
[[nodiscard]] CrossEntropy cross_entropy(std::span<const double> logits, int label, std::span<const bool> mask);
[[nodiscard]] CrossEntropy cross_entropy(std::span<const double> logits, int label);

/// Index of the largest unmasked entry (lowest index on ties).
[[nodiscard]] int masked_argmax(std::span<const double> logits, std::span<const bool> mask);

} // namespace evac
