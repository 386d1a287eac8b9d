#pragma once

#include <functional>
#include <span>
#include <vector>

#include "evac/dyngraph.hpp"

namespace evac {

/// A walk through the graph with the weight of each edge at the moment it
/// was traversed. `reached` is false for a rollout that ran out of budget.
struct Path {
    std::vector<NodeId> nodes;
    std::vector<double> edge_costs;
    bool reached = true;

    [[nodiscard]] double total_cost() const noexcept;
    [[nodiscard]] std::size_t steps() const noexcept { return edge_costs.size(); }
};

/// Minimum-weight path under frozen weights. Among equal-cost continuations
/// the smaller next node id wins. Throws NoPathError if goal is unreachable.
[[nodiscard]] Path dijkstra(const CityGraph &graph, std::span<const double> weights, NodeId start,
                            NodeId goal);

/// Shortest distances from `source` to every node (dense node order);
/// unreachable nodes get +inf.
[[nodiscard]] std::vector<double> shortest_distances(const CityGraph &graph,
                                                     std::span<const double> weights, NodeId source);

/// Chooses the next node from `current`; must return a neighbor.
using Policy = std::function<NodeId(const Environment &env, NodeId current)>;

/// Drives one scenario: at every node advance the dynamics, ask the policy
/// for the next node and travel there, until the chosen exit is reached or
/// the step budget runs out. The environment is taken by value, so callers
/// can replay the same scenario with several policies.
[[nodiscard]] Path run_policy(Environment env, const Policy &policy);

/// Dijkstra rerun on the current weights at every node.
[[nodiscard]] Path nodewise_dijkstra(Environment env);

/// Next node of the node-wise Dijkstra policy at the current state.
[[nodiscard]] NodeId dijkstra_next(const Environment &env, NodeId current);

} // namespace evac
