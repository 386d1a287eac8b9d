#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evac {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-5; ///< decoupled (AdamW)
};

class Adam {
  public:
    Adam(std::size_t n, AdamConfig config = {});

    /// One update with step size lr. Weight decay is applied as
    /// p -= lr * wd * p, separately from the moment estimate.
    void step(std::span<double> params, std::span<const double> grads, double lr);

    [[nodiscard]] std::size_t steps() const noexcept { return t_; }
    [[nodiscard]] const AdamConfig &config() const noexcept { return config_; }
    [[nodiscard]] std::span<const double> first_moment() const noexcept { return m_; }
    [[nodiscard]] std::span<const double> second_moment() const noexcept { return v_; }

  private:
    AdamConfig config_;
    std::vector<double> m_, v_;
    std::size_t t_ = 0;
};

/// Learning-rate factor for epoch in [0, epochs): linear from start at the
/// first epoch to end at the last. A single epoch gets start.
[[nodiscard]] double lr_schedule(int epoch, int epochs = 100, double start = 1.0, double end = 0.1);

} // namespace evac
