#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "evac/dyngraph.hpp"

namespace evac {

/// Oracle and model outcome on one evaluation scenario.
struct PathRecord {
    int scenario_id = 0;
    NodeId start = 0;
    NodeId exit = 0;
    bool oracle_reached = false;
    bool model_reached = false;
    double oracle_cost = 0.0;
    double model_cost = 0.0;
    std::size_t oracle_steps = 0;
    std::size_t model_steps = 0;
    std::optional<double> accuracy; ///< set only when both rollouts reached the exit
};

struct CostPair {
    double oracle_cost;
    double model_cost;
};

/// Fraction of records whose model rollout reached the exit.
[[nodiscard]] double arrival_rate(std::span<const PathRecord> records);
[[nodiscard]] double arrival_rate(std::span<const bool> reached);

/// 1 - |1 - oracle/model|. Requires model_cost > 0.
[[nodiscard]] double path_accuracy(double oracle_cost, double model_cost);

/// Fraction of pairs with model_cost <= oracle_cost.
[[nodiscard]] double better_or_equal_rate(std::span<const CostPair> pairs);

struct EvalReport {
    double arrival_rate = 0.0;
    double mean_accuracy = 0.0;
    double better_or_equal_rate = 0.0;
    std::size_t n_scenarios = 0;
    std::size_t n_compared = 0; ///< records contributing to accuracy
    std::vector<PathRecord> records;
};

/// Aggregates per-path records. Failed model rollouts count against the
/// arrival rate and are excluded from accuracy.
[[nodiscard]] EvalReport summarize(std::vector<PathRecord> records);

[[nodiscard]] nlohmann::json report_to_json(const EvalReport &report);
[[nodiscard]] std::string records_to_csv(std::span<const PathRecord> records);

} // namespace evac
