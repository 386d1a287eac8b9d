#include "evac/dyngraph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "evac/error.hpp"

namespace evac {

CityGraph::CityGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    if (nodes_.empty()) {
        throw InvariantError("graph has no nodes");
    }
    auto [lo, hi] = std::minmax_element(nodes_.begin(), nodes_.end(),
                                        [](const Node &a, const Node &b) { return a.id < b.id; });
    min_id_ = lo->id;
    const auto span = static_cast<std::size_t>(hi->id - lo->id) + 1;
    if (span > 16 * nodes_.size() + 1024) {
        throw InvariantError("node ids are too sparse");
    }
    constexpr auto kAbsent = static_cast<std::size_t>(-1);
    index_.assign(span, kAbsent);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto &n = nodes_[i];
        if (!(n.pos.x >= 0.0 && n.pos.x <= 1.0 && n.pos.y >= 0.0 && n.pos.y <= 1.0)) {
            throw InvariantError("node " + std::to_string(n.id) + " lies outside the unit square");
        }
        auto &slot = index_[static_cast<std::size_t>(n.id - min_id_)];
        if (slot != kAbsent) {
            throw InvariantError("duplicate node id " + std::to_string(n.id));
        }
        slot = i;
    }

    std::vector<std::vector<Adjacent>> adj(nodes_.size());
    for (EdgeIndex e = 0; e < edges_.size(); ++e) {
        const auto &edge = edges_[e];
        if (!contains(edge.u) || !contains(edge.v)) {
            throw InvariantError("edge " + std::to_string(e) + " references an unknown node");
        }
        if (edge.u == edge.v) {
            throw InvariantError("self-loop on node " + std::to_string(edge.u));
        }
        if (!(edge.length_m > 0.0) || !(edge.speed_kmh > 0.0)) {
            throw InvariantError("edge " + std::to_string(e) + " has non-positive length or speed");
        }
        adj[index_of(edge.u)].push_back({edge.v, e});
        adj[index_of(edge.v)].push_back({edge.u, e});
    }
    adj_offset_.reserve(nodes_.size() + 1);
    adj_offset_.push_back(0);
    for (auto &list : adj) {
        std::sort(list.begin(), list.end(),
                  [](const Adjacent &a, const Adjacent &b) { return a.node < b.node; });
        for (std::size_t k = 1; k < list.size(); ++k) {
            if (list[k].node == list[k - 1].node) {
                throw InvariantError("duplicate edge to node " + std::to_string(list[k].node));
            }
        }
        adj_.insert(adj_.end(), list.begin(), list.end());
        adj_offset_.push_back(adj_.size());
    }
}

bool CityGraph::contains(NodeId id) const noexcept {
    if (id < min_id_) {
        return false;
    }
    const auto k = static_cast<std::size_t>(id - min_id_);
    return k < index_.size() && index_[k] != static_cast<std::size_t>(-1);
}

std::size_t CityGraph::index_of(NodeId id) const {
    if (!contains(id)) {
        throw NotFoundError("unknown node " + std::to_string(id));
    }
    return index_[static_cast<std::size_t>(id - min_id_)];
}

Point CityGraph::position(NodeId id) const { return nodes_[index_of(id)].pos; }

std::span<const Adjacent> CityGraph::neighbors(NodeId id) const {
    const auto i = index_of(id);
    return std::span<const Adjacent>(adj_).subspan(adj_offset_[i], adj_offset_[i + 1] - adj_offset_[i]);
}

std::size_t CityGraph::max_degree() const noexcept {
    std::size_t best = 0;
    for (std::size_t i = 0; i + 1 < adj_offset_.size(); ++i) {
        best = std::max(best, adj_offset_[i + 1] - adj_offset_[i]);
    }
    return best;
}

std::optional<EdgeIndex> CityGraph::find_edge(NodeId a, NodeId b) const {
    for (const auto &adj : neighbors(a)) {
        if (adj.node == b) {
            return adj.edge;
        }
    }
    return std::nullopt;
}

NodeId CityGraph::other_end(EdgeIndex e, NodeId from) const {
    const auto &edge = edges_.at(e);
    return edge.u == from ? edge.v : edge.u;
}

bool CityGraph::is_connected() const {
    std::vector<char> seen(nodes_.size(), 0);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!frontier.empty()) {
        const auto i = frontier.front();
        frontier.pop();
        for (auto k = adj_offset_[i]; k < adj_offset_[i + 1]; ++k) {
            const auto j = index_of(adj_[k].node);
            if (!seen[j]) {
                seen[j] = 1;
                ++count;
                frontier.push(j);
            }
        }
    }
    return count == nodes_.size();
}

Point edge_center(const CityGraph &graph, EdgeIndex edge) {
    if (edge >= graph.edge_count()) {
        throw NotFoundError("unknown edge " + std::to_string(edge));
    }
    const auto &e = graph.edges()[edge];
    const auto a = graph.position(e.u);
    const auto b = graph.position(e.v);
    return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

double RadiusModel::epicenter(int t) { return 0.5 + std::sqrt(0.0002 * t); }

double RadiusModel::exit(int t) { return std::sqrt(0.00075 * t); }

double nominal_travel_time(double length_m, double speed_kmh) {
    if (!(length_m > 0.0) || !(speed_kmh > 0.0)) {
        throw ArgumentError("length and speed must be positive");
    }
    return length_m / (speed_kmh * 1000.0 / 60.0);
}

double base_travel_time(double length_m, double speed_kmh, double sigma_frac, std::mt19937_64 &rng) {
    if (sigma_frac < 0.0) {
        throw ArgumentError("sigma_frac must be non-negative");
    }
    const double nominal = nominal_travel_time(length_m, speed_kmh);
    if (sigma_frac == 0.0) {
        return nominal;
    }
    std::normal_distribution<double> noise(nominal, sigma_frac * nominal);
    return std::max(noise(rng), 0.1 * nominal);
}

std::vector<double> nominal_weights(const CityGraph &graph) {
    std::vector<double> w;
    w.reserve(graph.edge_count());
    for (const auto &e : graph.edges()) {
        w.push_back(nominal_travel_time(e.length_m, e.speed_kmh));
    }
    return w;
}

std::vector<double> sample_base_weights(const CityGraph &graph, double sigma_frac, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> w;
    w.reserve(graph.edge_count());
    for (const auto &e : graph.edges()) {
        w.push_back(base_travel_time(e.length_m, e.speed_kmh, sigma_frac, rng));
    }
    return w;
}

std::vector<NodeId> default_exits(const CityGraph &graph, std::size_t count) {
    static constexpr std::array<Point, 6> kAnchors{
        Point{1.0, 0.5}, Point{0.0, 1.0}, Point{0.25, 0.0},
        Point{1.0, 1.0}, Point{0.0, 0.25}, Point{0.75, 0.0}};
    if (count == 0 || count > kAnchors.size() || count >= graph.node_count()) {
        throw ArgumentError("unsupported exit count");
    }
    std::vector<NodeId> exits;
    for (std::size_t a = 0; a < count; ++a) {
        NodeId best = 0;
        double best_d = INFINITY;
        for (const auto &n : graph.nodes()) {
            if (std::find(exits.begin(), exits.end(), n.id) != exits.end()) {
                continue;
            }
            const double d = std::hypot(n.pos.x - kAnchors[a].x, n.pos.y - kAnchors[a].y);
            if (d < best_d) {
                best_d = d;
                best = n.id;
            }
        }
        exits.push_back(best);
    }
    return exits;
}

void ScenarioConfig::validate(const CityGraph &graph) const {
    if (!(epicenter.x >= 0.0 && epicenter.x <= 1.0 && epicenter.y >= 0.0 && epicenter.y <= 1.0)) {
        throw ArgumentError("epicenter outside the unit square");
    }
    if (exits.empty()) {
        throw ArgumentError("scenario needs at least one exit");
    }
    for (auto e : exits) {
        if (!graph.contains(e)) {
            throw ArgumentError("exit " + std::to_string(e) + " is not a graph node");
        }
    }
    if (std::find(exits.begin(), exits.end(), chosen_exit) == exits.end()) {
        throw ArgumentError("chosen exit is not one of the exits");
    }
    if (!graph.contains(start)) {
        throw ArgumentError("start " + std::to_string(start) + " is not a graph node");
    }
    if (std::find(exits.begin(), exits.end(), start) != exits.end()) {
        throw ArgumentError("start node is an exit");
    }
    if (max_steps < 0 || sigma_frac < 0.0) {
        throw ArgumentError("max_steps and sigma_frac must be non-negative");
    }
}

int ScenarioConfig::effective_max_steps(const CityGraph &graph) const {
    return max_steps > 0 ? max_steps : static_cast<int>(2 * graph.node_count());
}

namespace {

struct GrowthBand {
    double radius_frac;
    double rate;
    double cap;
};

constexpr std::array<GrowthBand, 3> kQuakeBands{
    GrowthBand{0.3, 0.003, 5.0}, GrowthBand{0.75, 0.002, 4.0}, GrowthBand{1.0, 0.001, 3.0}};
constexpr std::array<GrowthBand, 3> kTrafficBands{
    GrowthBand{0.5, 0.03, 5.0}, GrowthBand{0.75, 0.02, 4.0}, GrowthBand{1.0, 0.01, 3.0}};

struct StaticBand {
    double radius_frac;
    double factor;
};

constexpr std::array<StaticBand, 3> kInitialBands{
    StaticBand{0.3, 5.0}, StaticBand{0.75, 2.0}, StaticBand{1.0, 1.3}};

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Growth is capped from above; a weight already beyond the cap (possible only
// after the static quake) is left where it is.
double grow(double w, double factor, double cap) {
    if (w >= cap) {
        return w;
    }
    return std::min(w * factor, cap);
}

double band_growth(double w, double d, double radius, int t, const std::array<GrowthBand, 3> &bands) {
    if (!(radius > 0.0)) {
        return w;
    }
    for (const auto &band : bands) {
        if (d <= band.radius_frac * radius) {
            return grow(w, std::sqrt(band.rate * t + 1.0), band.cap);
        }
    }
    return w;
}

} // namespace

double initial_quake_weight(double w, double d) {
    const double r = RadiusModel::epicenter(0);
    for (const auto &band : kInitialBands) {
        if (d <= band.radius_frac * r) {
            return w * band.factor;
        }
    }
    return w;
}

double quake_step_weight(double w, double d, int t) {
    return band_growth(w, d, RadiusModel::epicenter(t), t, kQuakeBands);
}

double traffic_step_weight(double w, double d, int t) { return band_growth(w, d, RadiusModel::exit(t), t, kTrafficBands); }

DynamicState::DynamicState(const CityGraph &graph, std::vector<double> base_weights, int max_steps,
                           Mechanisms mechanisms)
    : graph_(&graph), base_(std::move(base_weights)), weights_(base_), max_steps_(max_steps),
      mechanisms_(mechanisms) {
    if (base_.size() != graph.edge_count()) {
        throw ArgumentError("base weight count does not match edge count");
    }
    if (max_steps < 0) {
        throw ArgumentError("max_steps must be non-negative");
    }
    for (double w : base_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw ArgumentError("base weights must be positive and finite");
        }
    }
    centers_.reserve(graph.edge_count());
    for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
        centers_.push_back(edge_center(graph, e));
    }
}

void DynamicState::apply_initial_quake(Point epicenter) {
    if (quake_applied_ || t_ != 0) {
        throw StateError("initial quake must be applied exactly once, at t = 0");
    }
    quake_applied_ = true;
    epicenter_ = epicenter;
    if (!mechanisms_.initial_quake) {
        return;
    }
    for (std::size_t e = 0; e < weights_.size(); ++e) {
        weights_[e] = initial_quake_weight(weights_[e], distance(centers_[e], epicenter));
    }
}

void DynamicState::step_quake() {
    if (!quake_applied_) {
        throw StateError("ongoing quake requires the initial quake");
    }
    if (mechanisms_.ongoing_quake) {
        for (std::size_t e = 0; e < weights_.size(); ++e) {
            weights_[e] = quake_step_weight(weights_[e], distance(centers_[e], epicenter_), t_);
        }
    }
}

void DynamicState::step_traffic(std::span<const NodeId> exits) {
    if (!mechanisms_.traffic) {
        return;
    }
    for (auto exit : exits) {
        const auto origin = graph_->position(exit);
        for (std::size_t e = 0; e < weights_.size(); ++e) {
            weights_[e] = traffic_step_weight(weights_[e], distance(centers_[e], origin), t_);
        }
    }
}

StepStatus DynamicState::advance(std::span<const NodeId> exits) {
    if (!quake_applied_) {
        throw StateError("advance requires the initial quake");
    }
    if (t_ >= max_steps_) {
        return StepStatus::BudgetExhausted;
    }
    step_quake();
    step_traffic(exits);
    ++t_;
    return StepStatus::Ok;
}

Environment::Environment(const CityGraph &graph, ScenarioConfig scenario, Mechanisms mechanisms)
    : scenario_(std::move(scenario)),
      state_(graph, sample_base_weights(graph, scenario_.sigma_frac, scenario_.rng_seed),
             scenario_.effective_max_steps(graph), mechanisms) {
    scenario_.validate(graph);
    state_.apply_initial_quake(scenario_.epicenter);
}

} // namespace evac
