#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <random>
#include <utility>

#include "evac/dyngraph.hpp"
#include "evac/error.hpp"

namespace evac {

namespace {

constexpr double kBlockMeters = 250.0;
constexpr double kJitter = 0.25;
constexpr double kDiagonalProb = 0.35;
constexpr double kDeleteProb = 0.2;
constexpr std::size_t kMaxDegree = 5;
constexpr std::size_t kMinDegreeAfterDeletion = 2;
constexpr std::array<double, 3> kSpeeds{30.0, 40.0, 50.0};

using Pair = std::pair<int, int>;

bool connected_without(std::size_t n, const std::vector<Pair> &edges, const std::vector<char> &alive,
                       std::size_t skip) {
    std::vector<std::vector<int>> adj(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (alive[e] && e != skip) {
            adj[edges[e].first].push_back(edges[e].second);
            adj[edges[e].second].push_back(edges[e].first);
        }
    }
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    return count == n;
}

} // namespace

CityGraph synth_city(int n_rows, int n_cols, std::uint64_t seed) {
    if (n_rows < 2 || n_cols < 2) {
        throw ArgumentError("synth_city needs at least 2 rows and 2 columns");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-kJitter, kJitter);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto n = static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols);
    auto id = [n_cols](int r, int c) { return r * n_cols + c; };

    // Meters on a jittered grid.
    std::vector<Point> meters(n);
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            meters[id(r, c)] = {(c + jitter(rng)) * kBlockMeters, (r + jitter(rng)) * kBlockMeters};
        }
    }

    std::vector<Pair> edges;
    std::vector<std::size_t> degree(n, 0);
    auto add = [&](int a, int b) {
        if (degree[a] >= kMaxDegree || degree[b] >= kMaxDegree) {
            return;
        }
        edges.emplace_back(std::min(a, b), std::max(a, b));
        ++degree[a];
        ++degree[b];
    };
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            if (c + 1 < n_cols) {
                add(id(r, c), id(r, c + 1));
            }
            if (r + 1 < n_rows) {
                add(id(r, c), id(r + 1, c));
            }
        }
    }
    for (int r = 0; r + 1 < n_rows; ++r) {
        for (int c = 0; c + 1 < n_cols; ++c) {
            if (unit(rng) < kDiagonalProb) {
                if (unit(rng) < 0.5) {
                    add(id(r, c), id(r + 1, c + 1));
                } else {
                    add(id(r, c + 1), id(r + 1, c));
                }
            }
        }
    }

    std::vector<char> alive(edges.size(), 1);
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    for (auto e : order) {
        if (unit(rng) >= kDeleteProb) {
            continue;
        }
        const auto [a, b] = edges[e];
        if (degree[a] <= kMinDegreeAfterDeletion || degree[b] <= kMinDegreeAfterDeletion) {
            continue;
        }
        if (!connected_without(n, edges, alive, e)) {
            continue;
        }
        alive[e] = 0;
        --degree[a];
        --degree[b];
    }

    double min_x = INFINITY, max_x = -INFINITY, min_y = INFINITY, max_y = -INFINITY;
    for (const auto &p : meters) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    std::vector<Node> nodes;
    nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point unit_pos{(meters[i].x - min_x) / (max_x - min_x),
                             (meters[i].y - min_y) / (max_y - min_y)};
        nodes.push_back({static_cast<NodeId>(i),
                         {std::clamp(unit_pos.x, 0.0, 1.0), std::clamp(unit_pos.y, 0.0, 1.0)}});
    }

    std::uniform_int_distribution<std::size_t> speed_pick(0, kSpeeds.size() - 1);
    std::vector<Edge> out;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!alive[e]) {
            continue;
        }
        const auto [a, b] = edges[e];
        const double len = std::hypot(meters[a].x - meters[b].x, meters[a].y - meters[b].y);
        out.push_back({a, b, len, kSpeeds[speed_pick(rng)]});
    }
    std::sort(out.begin(), out.end(),
              [](const Edge &l, const Edge &r) { return std::pair(l.u, l.v) < std::pair(r.u, r.v); });
    return CityGraph(std::move(nodes), std::move(out));
}

} // namespace evac
