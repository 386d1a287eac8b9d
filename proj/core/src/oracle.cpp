#include "evac/oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "evac/error.hpp"

namespace evac {

double Path::total_cost() const noexcept {
    return std::accumulate(edge_costs.begin(), edge_costs.end(), 0.0);
}

std::vector<double> shortest_distances(const CityGraph &graph, std::span<const double> weights,
                                       NodeId source) {
    if (weights.size() != graph.edge_count()) {
        throw ArgumentError("weight count does not match edge count");
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(graph.node_count(), kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    const auto s = graph.index_of(source);
    dist[s] = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
        const auto [d, i] = heap.top();
        heap.pop();
        if (d > dist[i]) {
            continue;
        }
        for (const auto &adj : graph.neighbors(graph.id_at(i))) {
            const auto j = graph.index_of(adj.node);
            const double nd = d + weights[adj.edge];
            if (nd < dist[j]) {
                dist[j] = nd;
                heap.emplace(nd, j);
            }
        }
    }
    return dist;
}

Path dijkstra(const CityGraph &graph, std::span<const double> weights, NodeId start, NodeId goal) {
    if (!graph.contains(start) || !graph.contains(goal)) {
        throw NotFoundError("start or goal is not a graph node");
    }
    const auto to_goal = shortest_distances(graph, weights, goal);
    if (!std::isfinite(to_goal[graph.index_of(start)])) {
        throw NoPathError("no path from " + std::to_string(start) + " to " + std::to_string(goal));
    }
    Path path;
    path.nodes.push_back(start);
    NodeId current = start;
    while (current != goal) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto &adj : graph.neighbors(current)) {
            best = std::min(best, weights[adj.edge] + to_goal[graph.index_of(adj.node)]);
        }
        // Neighbors are id-sorted; the first one within rounding of the best wins.
        const double tol = 1e-12 * best;
        for (const auto &adj : graph.neighbors(current)) {
            if (weights[adj.edge] + to_goal[graph.index_of(adj.node)] <= best + tol) {
                path.nodes.push_back(adj.node);
                path.edge_costs.push_back(weights[adj.edge]);
                current = adj.node;
                break;
            }
        }
    }
    return path;
}

Path run_policy(Environment env, const Policy &policy) {
    const auto &graph = env.graph();
    const NodeId goal = env.scenario().chosen_exit;
    Path path;
    NodeId current = env.scenario().start;
    path.nodes.push_back(current);
    while (current != goal) {
        if (env.advance() == StepStatus::BudgetExhausted) {
            path.reached = false;
            return path;
        }
        const NodeId next = policy(env, current);
        const auto edge = graph.find_edge(current, next);
        if (!edge) {
            throw InvariantError("policy moved from " + std::to_string(current) + " to non-neighbor " +
                                 std::to_string(next));
        }
        path.edge_costs.push_back(env.state().weight(*edge));
        path.nodes.push_back(next);
        current = next;
    }
    return path;
}

NodeId dijkstra_next(const Environment &env, NodeId current) {
    const auto path = dijkstra(env.graph(), env.state().weights(), current, env.scenario().chosen_exit);
    return path.nodes.at(1);
}

Path nodewise_dijkstra(Environment env) { return run_policy(std::move(env), dijkstra_next); }

} // namespace evac
