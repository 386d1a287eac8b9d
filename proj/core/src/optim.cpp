#include "evac/optim.hpp"

#include <cmath>
#include <string>

#include "evac/error.hpp"

namespace evac {

Adam::Adam(std::size_t n, AdamConfig config) : config_(config), m_(n, 0.0), v_(n, 0.0) {
    if (!(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 && config.beta2 < 1.0)) {
        throw ArgumentError("Adam betas must lie in [0, 1)");
    }
    if (!(config.eps > 0.0) || config.weight_decay < 0.0) {
        throw ArgumentError("Adam eps must be positive and weight decay non-negative");
    }
}

void Adam::step(std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ArgumentError("Adam state holds " + std::to_string(m_.size()) + " parameters");
    }
    ++t_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
        v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
        const double mhat = m_[i] / c1;
        const double vhat = v_[i] / c2;
        params[i] -= lr * (mhat / (std::sqrt(vhat) + config_.eps) + config_.weight_decay * params[i]);
    }
}

double lr_schedule(int epoch, int epochs, double start, double end) {
    if (epochs < 1 || epoch < 0 || epoch >= epochs) {
        throw ArgumentError("epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(epochs) + ")");
    }
    if (epochs == 1) {
        return start;
    }
    const double frac = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
    return start + (end - start) * frac;
}

} // namespace evac
