#include "evac/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "evac/error.hpp"

namespace evac {

double euclid(Point p, Point q) {
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    return std::sqrt(dx * dx + dy * dy);
}

Cosine cosine_dir(Point current, Point neighbor, Point exit) {
    const double ax = neighbor.x - current.x;
    const double ay = neighbor.y - current.y;
    const double bx = exit.x - current.x;
    const double by = exit.y - current.y;
    const double na = std::sqrt(ax * ax + ay * ay);
    const double nb = std::sqrt(bx * bx + by * by);
    if (na == 0.0 || nb == 0.0) {
        return {0.0, true};
    }
    return {std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0), false};
}

std::vector<double> edge_betweenness(const CityGraph &graph, std::span<const double> weights) {
    if (weights.size() != graph.edge_count()) {
        throw ArgumentError("weight count does not match edge count");
    }
    const std::size_t n = graph.node_count();
    std::vector<double> score(graph.edge_count(), 0.0);
    if (n < 2) {
        return score;
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();
    struct Pred {
        std::size_t node;
        EdgeIndex edge;
    };
    std::vector<double> dist(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<std::vector<Pred>> preds(n);
    std::vector<std::size_t> order;
    order.reserve(n);
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };

    for (std::size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto &p : preds) {
            p.clear();
        }
        order.clear();
        std::vector<char> settled(n, 0);

        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[s] = 0.0;
        sigma[s] = 1.0;
        heap.emplace(0.0, s);
        while (!heap.empty()) {
            const auto [d, v] = heap.top();
            heap.pop();
            if (settled[v] || d > dist[v]) {
                continue;
            }
            settled[v] = 1;
            order.push_back(v);
            for (const auto &adj : graph.neighbors(graph.id_at(v))) {
                const auto w = graph.index_of(adj.node);
                if (settled[w]) {
                    continue;
                }
                const double nd = d + weights[adj.edge];
                if (dist[w] < kInf && same(nd, dist[w])) {
                    sigma[w] += sigma[v];
                    preds[w].push_back({v, adj.edge});
                } else if (nd < dist[w]) {
                    dist[w] = nd;
                    sigma[w] = sigma[v];
                    preds[w].assign(1, {v, adj.edge});
                    heap.emplace(nd, w);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto w = *it;
            for (const auto &p : preds[w]) {
                const double c = sigma[p.node] / sigma[w] * (1.0 + delta[w]);
                score[p.edge] += c;
                delta[p.node] += c;
            }
        }
    }
    const double norm = static_cast<double>(n) * static_cast<double>(n - 1);
    for (auto &v : score) {
        v /= norm;
    }
    return score;
}

NeighborMask ModelInput::mask() const noexcept { return mask_for(n_neighbors); }

NeighborMask mask_for(std::size_t n_neighbors) noexcept {
    NeighborMask m{};
    for (std::size_t k = 0; k < kMaxNeighbors; ++k) {
        m[k] = k < n_neighbors;
    }
    return m;
}

ModelInput build_input(const Environment &env, NodeId current, std::span<const double> betweenness) {
    const auto &graph = env.graph();
    if (betweenness.size() != graph.edge_count()) {
        throw ArgumentError("betweenness size does not match edge count");
    }
    const auto adjacent = graph.neighbors(current);
    if (adjacent.size() > kMaxNeighbors) {
        throw InvariantError("node " + std::to_string(current) + " has degree " +
                             std::to_string(adjacent.size()) + " > 5");
    }
    const Point here = graph.position(current);
    const Point dest = graph.position(env.scenario().chosen_exit);
    const Point epi = env.scenario().epicenter;

    ModelInput in;
    auto &f = in.features;
    f[feature::kEpiX] = epi.x;
    f[feature::kEpiY] = epi.y;
    f[feature::kCurrentX] = here.x;
    f[feature::kCurrentY] = here.y;
    f[feature::kDestX] = dest.x;
    f[feature::kDestY] = dest.y;
    in.n_neighbors = adjacent.size();
    for (std::size_t k = 0; k < adjacent.size(); ++k) {
        const auto &adj = adjacent[k];
        const Point there = graph.position(adj.node);
        in.neighbors[k] = adj.node;
        f[feature::block(k, feature::kBlockX)] = there.x;
        f[feature::block(k, feature::kBlockY)] = there.y;
        f[feature::block(k, feature::kBlockWeight)] = env.state().weight(adj.edge) / kWeightScale;
        f[feature::block(k, feature::kBlockBetweenness)] = betweenness[adj.edge];
        f[feature::block(k, feature::kBlockDistance)] = euclid(there, dest);
        f[feature::block(k, feature::kBlockCosine)] = cosine_dir(here, there, dest).value;
    }
    return in;
}

MainFeatures main_features(const FeatureVector &f) noexcept {
    MainFeatures m{};
    std::copy(f.begin() + kFilmFeatureCount, f.end(), m.begin());
    return m;
}

std::array<double, kFilmFeatureCount> film_features(const FeatureVector &f) noexcept {
    return {f[feature::kEpiX], f[feature::kEpiY]};
}

} // namespace evac
