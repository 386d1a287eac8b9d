#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evac/dataset.hpp"
#include "evac/hybrid.hpp"

namespace evac {

struct TrainConfig {
    int epochs = 100;
    std::size_t batch_size = 2000; ///< clamped to the training set size
    double classical_lr = 1e-3;
    double quantum_lr = 1e-3;
    double weight_decay = 1e-5;
    double lr_start = 1.0;
    double lr_end = 0.1;
    std::uint64_t seed = 0;
    bool classical_only = false;
    bool dropout = true;
    QuantumGradient quantum_gradient = QuantumGradient::ParameterShift;
    unsigned jobs = 1;
    /// Per-batch gradient is summed in this many fixed slices, in order, so
    /// results do not depend on jobs.
    std::size_t chunks = 16;

    void validate() const;
};

[[nodiscard]] nlohmann::json train_config_to_json(const TrainConfig &c);
/// Missing keys keep their defaults; unknown keys are an error.
[[nodiscard]] TrainConfig train_config_from_json(const nlohmann::json &doc);

struct LossSummary {
    double loss = 0.0;
    double accuracy = 0.0; ///< fraction whose masked argmax equals the label
    std::size_t n = 0;
};

/// Eval-mode mean loss and next-node agreement.
[[nodiscard]] LossSummary evaluate_samples(const HybridModel &model, const HybridParams &params,
                                           std::span<const Sample> samples, unsigned jobs = 1);

struct EpochRecord {
    int epoch = 0; ///< 0 is the initial model, before any update
    double lr_factor = 0.0;
    LossSummary train;
    LossSummary validation;
};

struct TrainResult {
    HybridParams params;
    std::vector<EpochRecord> history;
};

/// Minibatch Adam training on masked cross-entropy. Deterministic in
/// config.seed for a fixed sample order.
[[nodiscard]] TrainResult train(const HybridModel &model, std::span<const Sample> train_set,
                                std::span<const Sample> validation_set, const TrainConfig &config,
                                const std::function<void(const EpochRecord &)> &on_epoch = {});

/// Mean batch gradient (no dropout) for testing and diagnostics.
[[nodiscard]] HybridParams batch_gradient(const HybridModel &model, const HybridParams &params,
                                          std::span<const Sample> batch, double *mean_loss = nullptr,
                                          QuantumGradient method = QuantumGradient::ParameterShift);

[[nodiscard]] const char *gradient_name(QuantumGradient method) noexcept;
/// "shift" or "adjoint"
[[nodiscard]] QuantumGradient parse_gradient(const std::string &name);

[[nodiscard]] nlohmann::json history_to_json(std::span<const EpochRecord> history);

} // namespace evac
