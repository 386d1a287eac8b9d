#pragma once

// Independent reference implementations used only by tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "evac/circuit.hpp"
#include "evac/dyngraph.hpp"

namespace testing_support {

using evac::CityGraph;
using evac::Edge;
using evac::Node;
using evac::NodeId;
using evac::Point;

inline CityGraph make_graph(std::vector<Point> pos, std::vector<std::pair<NodeId, NodeId>> links,
                            double length_m = 1000.0, double speed = 60.0) {
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        nodes.push_back({static_cast<NodeId>(i), pos[i]});
    }
    std::vector<Edge> edges;
    for (auto [u, v] : links) {
        edges.push_back({u, v, length_m, speed});
    }
    return CityGraph(std::move(nodes), std::move(edges));
}

/// Random connected graph on n nodes: a random spanning tree plus extra edges.
inline CityGraph random_graph(std::size_t n, std::mt19937_64 &rng, double extra_p = 0.35) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> pos(n);
    for (auto &p : pos) {
        p = {unit(rng), unit(rng)};
    }
    std::vector<std::pair<NodeId, NodeId>> links;
    for (std::size_t i = 1; i < n; ++i) {
        const auto j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
        links.emplace_back(static_cast<NodeId>(j), static_cast<NodeId>(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool present = std::any_of(links.begin(), links.end(), [&](auto l) {
                return (l.first == NodeId(i) && l.second == NodeId(j)) || (l.first == NodeId(j) && l.second == NodeId(i));
            });
            if (!present && unit(rng) < extra_p) {
                links.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
            }
        }
    }
    return make_graph(pos, links);
}

/// Every simple path from s to g, as node lists.
inline std::vector<std::vector<NodeId>> simple_paths(const CityGraph &g, NodeId s, NodeId goal) {
    std::vector<std::vector<NodeId>> out;
    std::vector<NodeId> path{s};
    std::vector<char> seen(g.node_count(), 0);
    seen[g.index_of(s)] = 1;
    std::function<void(NodeId)> dfs = [&](NodeId u) {
        if (u == goal) {
            out.push_back(path);
            return;
        }
        for (const auto &a : g.neighbors(u)) {
            const auto k = g.index_of(a.node);
            if (seen[k]) {
                continue;
            }
            seen[k] = 1;
            path.push_back(a.node);
            dfs(a.node);
            path.pop_back();
            seen[k] = 0;
        }
    };
    dfs(s);
    return out;
}

inline double path_cost(const CityGraph &g, std::span<const double> w, const std::vector<NodeId> &p) {
    double c = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        c += w[*g.find_edge(p[i - 1], p[i])];
    }
    return c;
}

/// Edge betweenness by enumerating, for each ordered pair, every simple
/// path of minimal cost. Normalized by n(n-1).
inline std::vector<double> betweenness_by_enumeration(const CityGraph &g, std::span<const double> w) {
    const auto n = g.node_count();
    std::vector<double> b(g.edge_count(), 0.0);
    for (const auto &s : g.nodes()) {
        for (const auto &t : g.nodes()) {
            if (s.id == t.id) {
                continue;
            }
            const auto paths = simple_paths(g, s.id, t.id);
            if (paths.empty()) {
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            for (const auto &p : paths) {
                best = std::min(best, path_cost(g, w, p));
            }
            std::vector<const std::vector<NodeId> *> shortest;
            for (const auto &p : paths) {
                if (path_cost(g, w, p) <= best * (1 + 1e-12)) {
                    shortest.push_back(&p);
                }
            }
            for (const auto *p : shortest) {
                for (std::size_t i = 1; i < p->size(); ++i) {
                    b[*g.find_edge((*p)[i - 1], (*p)[i])] += 1.0 / static_cast<double>(shortest.size());
                }
            }
        }
    }
    for (auto &x : b) {
        x /= static_cast<double>(n * (n - 1));
    }
    return b;
}

// ---- dynamic weights replay -----------------------------------------------

inline double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Step-by-step replay of the dynamic weight rules, written out independently.
struct Replay {
    const CityGraph &g;
    std::vector<double> w;
    Point epi;
    std::vector<NodeId> exits;
    int t = 0;

    static double capped(double w, double f, double cap) { return w >= cap ? w : std::min(w * f, cap); }

    void initial() {
        for (std::size_t e = 0; e < w.size(); ++e) {
            const double d = dist(evac::edge_center(g, e), epi);
            if (d <= 0.15) {
                w[e] *= 5;
            } else if (d <= 0.375) {
                w[e] *= 2;
            } else if (d <= 0.5) {
                w[e] *= 1.3;
            }
        }
    }
    void step() {
        const double re = 0.5 + std::sqrt(0.0002 * t);
        for (std::size_t e = 0; e < w.size(); ++e) {
            const double d = dist(evac::edge_center(g, e), epi);
            if (d <= 0.3 * re) {
                w[e] = capped(w[e], std::sqrt(0.003 * t + 1), 5);
            } else if (d <= 0.75 * re) {
                w[e] = capped(w[e], std::sqrt(0.002 * t + 1), 4);
            } else if (d <= re) {
                w[e] = capped(w[e], std::sqrt(0.001 * t + 1), 3);
            }
        }
        const double rx = std::sqrt(0.00075 * t);
        for (auto x : exits) {
            if (rx <= 0) {
                break;
            }
            for (std::size_t e = 0; e < w.size(); ++e) {
                const double d = dist(evac::edge_center(g, e), g.position(x));
                if (d <= 0.5 * rx) {
                    w[e] = capped(w[e], std::sqrt(0.03 * t + 1), 5);
                } else if (d <= 0.75 * rx) {
                    w[e] = capped(w[e], std::sqrt(0.02 * t + 1), 4);
                } else if (d <= rx) {
                    w[e] = capped(w[e], std::sqrt(0.01 * t + 1), 3);
                }
            }
        }
        ++t;
    }
};

// ---- dense-matrix quantum oracle -------------------------------------------

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline CMatrix single(std::size_t n, std::size_t q, const CMatrix &m) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) {
        out = kron(out, k == q ? m : CMatrix::Identity(2, 2));
    }
    return out;
}

inline CMatrix rotation(evac::qsim::GateKind kind, double a) {
    using C = std::complex<double>;
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    CMatrix m(2, 2);
    switch (kind) {
    case evac::qsim::GateKind::RX:
        m << C(c, 0), C(0, -s), C(0, -s), C(c, 0);
        break;
    case evac::qsim::GateKind::RY:
        m << C(c, 0), C(-s, 0), C(s, 0), C(c, 0);
        break;
    case evac::qsim::GateKind::RZ:
        m << std::polar(1.0, -a / 2), C(0, 0), C(0, 0), std::polar(1.0, a / 2);
        break;
    case evac::qsim::GateKind::H: {
        const double r = 1 / std::sqrt(2.0);
        m << C(r, 0), C(r, 0), C(r, 0), C(-r, 0);
        break;
    }
    default:
        throw std::logic_error("not a single-qubit gate");
    }
    return m;
}

/// CNOT as an explicit permutation matrix, qubit 0 most significant.
inline CMatrix cnot_matrix(std::size_t n, std::size_t c, std::size_t t) {
    const std::size_t d = std::size_t{1} << n;
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        std::size_t j = i;
        if ((i >> (n - 1 - c)) & 1U) {
            j ^= std::size_t{1} << (n - 1 - t);
        }
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return m;
}

/// Full unitary of a bound circuit by multiplying dense gate matrices.
inline CMatrix dense_unitary(const evac::qsim::Circuit &c, std::span<const double> params,
                             std::span<const double> feats) {
    const auto n = c.n_qubits();
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    CMatrix u = CMatrix::Identity(d, d);
    for (const auto &g : c.gates()) {
        if (g.kind == evac::qsim::GateKind::CNOT) {
            u = cnot_matrix(n, g.control, g.target) * u;
        } else {
            const double a = evac::qsim::resolve_angle(g.angle, params, feats);
            u = single(n, g.target, rotation(g.kind, a)) * u;
        }
    }
    return u;
}

inline std::vector<double> dense_z(const CVector &psi, std::size_t n, std::span<const std::size_t> qubits) {
    std::vector<double> out;
    for (auto q : qubits) {
        double e = 0;
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            const bool one = (static_cast<std::size_t>(i) >> (n - 1 - q)) & 1U;
            e += (one ? -1.0 : 1.0) * std::norm(psi(i));
        }
        out.push_back(e);
    }
    return out;
}

inline std::vector<double> dense_expectations(const evac::qsim::Circuit &c, std::span<const double> params,
                                              std::span<const double> feats) {
    const auto u = dense_unitary(c, params, feats);
    CVector psi = CVector::Zero(u.rows());
    psi(0) = 1.0;
    psi = u * psi;
    return dense_z(psi, c.n_qubits(), c.measured());
}

inline std::vector<double> uniform_vector(std::size_t n, std::mt19937_64 &rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto &x : v) {
        x = d(rng);
    }
    return v;
}

} // namespace testing_support
