#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evac/dyngraph.hpp"
#include "evac/hybrid.hpp"
#include "evac/metrics.hpp"
#include "evac/oracle.hpp"

namespace evac {

/// Model-driven walk: at each node pick the masked argmax neighbor, then
/// advance. Path::reached is false when the step budget runs out.
[[nodiscard]] Path rollout(const HybridModel &model, const HybridParams &params, Environment env,
                           std::span<const double> betweenness);
[[nodiscard]] Path rollout(const HybridModel &model, const HybridParams &params, Environment env);

struct EvalConfig {
    int n_scenarios = 100;
    std::uint64_t seed = 0;
    std::vector<NodeId> exits; ///< empty selects default_exits(graph)
    double sigma_frac = 0.1;
    int max_steps = 0;
    unsigned jobs = 1;
};

/// Rolls out the model and node-wise Dijkstra on the same seeded scenarios.
[[nodiscard]] EvalReport evaluate(const HybridModel &model, const HybridParams &params, const CityGraph &graph,
                                  const EvalConfig &config);

} // namespace evac
