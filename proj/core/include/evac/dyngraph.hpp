#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace evac {

using NodeId = std::int32_t;
using EdgeIndex = std::size_t;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point &, const Point &) = default;
};

struct Node {
    NodeId id = 0;
    Point pos;

    friend bool operator==(const Node &, const Node &) = default;
};

/// Undirected road segment.
struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    double length_m = 0.0;
    double speed_kmh = 0.0;

    friend bool operator==(const Edge &, const Edge &) = default;
};

struct Adjacent {
    NodeId node;
    EdgeIndex edge;
};

/// Immutable undirected road network with coordinates in the unit square.
///
/// Construction validates the structural invariants (unique ids, no
/// self-loops, no duplicate edges, coordinates in [0,1]^2) and throws
/// InvariantError on violation. Adjacency lists are sorted by neighbor id
/// so that every consumer sees the same neighbor order.
class CityGraph {
  public:
    CityGraph(std::vector<Node> nodes, std::vector<Edge> edges);

    [[nodiscard]] const std::vector<Node> &nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Edge> &edges() const noexcept { return edges_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }

    [[nodiscard]] bool contains(NodeId id) const noexcept;
    /// Dense index of a node id; throws NotFoundError.
    [[nodiscard]] std::size_t index_of(NodeId id) const;
    [[nodiscard]] NodeId id_at(std::size_t index) const { return nodes_.at(index).id; }
    [[nodiscard]] Point position(NodeId id) const;

    /// Neighbors sorted by ascending node id.
    [[nodiscard]] std::span<const Adjacent> neighbors(NodeId id) const;
    [[nodiscard]] std::size_t degree(NodeId id) const { return neighbors(id).size(); }
    [[nodiscard]] std::size_t max_degree() const noexcept;
    [[nodiscard]] std::optional<EdgeIndex> find_edge(NodeId a, NodeId b) const;
    [[nodiscard]] NodeId other_end(EdgeIndex e, NodeId from) const;

    [[nodiscard]] bool is_connected() const;

    friend bool operator==(const CityGraph &a, const CityGraph &b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

  private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> index_; // position of node id in nodes_, by id - min_id_
    NodeId min_id_ = 0;
    std::vector<std::size_t> adj_offset_;
    std::vector<Adjacent> adj_;
};

/// Midpoint of the two endpoints of an edge. Throws NotFoundError for an
/// index outside the graph.
[[nodiscard]] Point edge_center(const CityGraph &graph, EdgeIndex edge);

/// Growth laws of the two circular areas of effect, in unit-square units.
struct RadiusModel {
    [[nodiscard]] static double epicenter(int t);
    [[nodiscard]] static double exit(int t);
};

/// Single-edge update rules; d is the distance from the edge center to the
/// effect center. Bands are inclusive on their outer edge.
/// Static multiplication at t = 0 (x5, x2, x1.3), uncapped.
[[nodiscard]] double initial_quake_weight(double w, double d);
/// Ongoing quake at step t: sqrt(rate * t + 1) growth capped at 5, 4, 3.
[[nodiscard]] double quake_step_weight(double w, double d, int t);
/// Traffic around one exit at step t: sqrt(rate * t + 1) capped at 5, 4, 3.
[[nodiscard]] double traffic_step_weight(double w, double d, int t);

/// Nominal traversal time in minutes.
[[nodiscard]] double nominal_travel_time(double length_m, double speed_kmh);

/// Gaussian-perturbed traversal time, truncated below at 0.1 * nominal.
[[nodiscard]] double base_travel_time(double length_m, double speed_kmh, double sigma_frac,
                                      std::mt19937_64 &rng);

/// Nominal travel time of every edge, in edge order.
[[nodiscard]] std::vector<double> nominal_weights(const CityGraph &graph);

/// Grid-with-diagonals stand-in city. Connected, max degree 5, deterministic
/// in the seed.
[[nodiscard]] CityGraph synth_city(int n_rows, int n_cols, std::uint64_t seed);

/// Exit nodes nearest to fixed anchor points on the map boundary.
[[nodiscard]] std::vector<NodeId> default_exits(const CityGraph &graph, std::size_t count = 3);

struct ScenarioConfig {
    Point epicenter;
    NodeId start = 0;
    std::vector<NodeId> exits;
    NodeId chosen_exit = 0;
    std::uint64_t rng_seed = 0;
    int max_steps = 0;       ///< 0 selects the default of 2 * node_count
    double sigma_frac = 0.1; ///< relative noise on base travel times

    /// Throws ArgumentError when an invariant is broken.
    void validate(const CityGraph &graph) const;
    [[nodiscard]] int effective_max_steps(const CityGraph &graph) const;
};

/// Switches for the three weight mechanisms. Disabling all of them yields
/// a static graph.
struct Mechanisms {
    bool initial_quake = true;
    bool ongoing_quake = true;
    bool traffic = true;

    [[nodiscard]] static Mechanisms none() { return {false, false, false}; }
};

enum class StepStatus { Ok, BudgetExhausted };

/// Per-scenario mutable overlay of edge weights on an immutable graph.
class DynamicState {
  public:
    DynamicState(const CityGraph &graph, std::vector<double> base_weights, int max_steps,
                 Mechanisms mechanisms = {});

    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double weight(EdgeIndex e) const { return weights_.at(e); }
    [[nodiscard]] std::span<const double> base_weights() const noexcept { return base_; }
    [[nodiscard]] int t() const noexcept { return t_; }
    [[nodiscard]] int max_steps() const noexcept { return max_steps_; }
    [[nodiscard]] bool quake_applied() const noexcept { return quake_applied_; }
    [[nodiscard]] const Mechanisms &mechanisms() const noexcept { return mechanisms_; }
    [[nodiscard]] const CityGraph &graph() const noexcept { return *graph_; }

    /// Static multiplication around the epicenter. Allowed once, at t = 0.
    void apply_initial_quake(Point epicenter);
    /// Ongoing earthquake mechanism at the current t.
    void step_quake();
    /// Congestion mechanism around every exit at the current t.
    void step_traffic(std::span<const NodeId> exits);
    /// step_quake, step_traffic, then t += 1. Returns BudgetExhausted without
    /// touching the weights once t has reached max_steps.
    StepStatus advance(std::span<const NodeId> exits);

  private:
    const CityGraph *graph_;
    std::vector<double> base_;
    std::vector<double> weights_;
    std::vector<Point> centers_;
    Point epicenter_;
    int t_ = 0;
    int max_steps_;
    bool quake_applied_ = false;
    Mechanisms mechanisms_;
};

/// One scenario: graph reference, configuration and the evolving state.
/// The graph must outlive the environment.
class Environment {
  public:
    /// Samples base weights from the scenario seed and applies the initial
    /// earthquake.
    Environment(const CityGraph &graph, ScenarioConfig scenario, Mechanisms mechanisms = {});

    [[nodiscard]] const CityGraph &graph() const noexcept { return state_.graph(); }
    [[nodiscard]] const ScenarioConfig &scenario() const noexcept { return scenario_; }
    [[nodiscard]] const DynamicState &state() const noexcept { return state_; }
    StepStatus advance() { return state_.advance(scenario_.exits); }

  private:
    ScenarioConfig scenario_;
    DynamicState state_;
};

/// Samples base weights for a scenario (seeded by scenario.rng_seed).
[[nodiscard]] std::vector<double> sample_base_weights(const CityGraph &graph, double sigma_frac,
                                                      std::uint64_t seed);

} // namespace evac
