#include "evac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "evac/error.hpp"
#include "evac/parallel.hpp"

namespace evac::analysis {

Eigen::MatrixXd circuit_fisher(const qsim::Circuit &circuit, std::span<const double> params,
                               std::span<const std::vector<double>> xs, std::span<const std::size_t> selected,
                               std::size_t *clamped) {
    if (xs.empty()) {
        throw ArgumentError("need at least one feature sample");
    }
    const auto n = selected.size();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::size_t floor_hits = 0;
    for (const auto &x : xs) {
        auto p = qsim::simulate(circuit, params, x).probabilities();
        const auto dim = p.size();
        Eigen::MatrixXd G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < n; ++i) {
            const auto g = qsim::param_shift_probability_grad(circuit, params, x, selected[i]);
            for (std::size_t y = 0; y < dim; ++y) {
                G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(y)) = g[y];
            }
        }
        Eigen::VectorXd inv(static_cast<Eigen::Index>(dim));
        for (std::size_t y = 0; y < dim; ++y) {
            if (p[y] < kProbabilityFloor) {
                p[y] = kProbabilityFloor;
                ++floor_hits;
            }
            inv(static_cast<Eigen::Index>(y)) = 1.0 / p[y];
        }
        F.noalias() += G * inv.asDiagonal() * G.transpose();
    }
    F /= static_cast<double>(xs.size());
    F = 0.5 * (F + F.transpose()).eval();
    if (clamped != nullptr) {
        *clamped += floor_hits;
    }
    return F;
}

FisherMatrix fisher_matrix(const MiniCircuitConfig &config, std::size_t n_x, std::size_t n_theta,
                           std::uint64_t seed, FisherScope scope, unsigned jobs) {
    config.validate();
    if (n_x < 1 || n_theta < 1) {
        throw ArgumentError("Fisher sample counts must be at least 1");
    }
    const auto circuit = mini_circuit(config);
    const auto n_sel = scope == FisherScope::Film ? config.film_parameter_count() : config.parameter_count();
    std::vector<std::size_t> selected(n_sel);
    for (std::size_t i = 0; i < n_sel; ++i) {
        selected[i] = i;
    }
    // Draws are made up front so the result does not depend on jobs.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> thetas(n_theta);
    std::vector<std::vector<std::vector<double>>> xs(n_theta);
    for (std::size_t r = 0; r < n_theta; ++r) {
        thetas[r].resize(config.parameter_count());
        for (auto &v : thetas[r]) {
            v = angle(rng);
        }
        xs[r].assign(n_x, std::vector<double>(4));
        for (auto &x : xs[r]) {
            for (auto &v : x) {
                v = gauss(rng);
            }
        }
    }
    std::vector<Eigen::MatrixXd> parts(n_theta);
    std::vector<std::size_t> clamps(n_theta, 0);
    parallel_for(n_theta, jobs, [&](std::size_t r) {
        parts[r] = circuit_fisher(circuit, thetas[r], xs[r], selected, &clamps[r]);
    });
    FisherMatrix out;
    out.N = config.N;
    out.K = config.K;
    out.n_x = n_x;
    out.n_theta = n_theta;
    out.F = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_sel), static_cast<Eigen::Index>(n_sel));
    for (std::size_t r = 0; r < n_theta; ++r) {
        out.F += parts[r];
        out.clamped += clamps[r];
    }
    out.F /= static_cast<double>(n_theta);
    return out;
}

SpectrumReport fisher_spectrum_report(const Eigen::MatrixXd &F, double rank_tol, double near_zero_tol,
                                      std::size_t bins) {
    if (F.rows() != F.cols() || F.rows() == 0) {
        throw ArgumentError("Fisher matrix must be square and non-empty");
    }
    if (!F.allFinite()) {
        throw ArgumentError("Fisher matrix has non-finite entries");
    }
    const double scale = std::max(1.0, F.cwiseAbs().maxCoeff());
    if ((F - F.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw ArgumentError("Fisher matrix is not symmetric");
    }
    if (bins == 0) {
        throw ArgumentError("histogram needs at least one bin");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(F, Eigen::EigenvaluesOnly);
    SpectrumReport r;
    const auto &ev = solver.eigenvalues();
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    const double top = std::max(ev.maxCoeff(), 0.0);
    double top_abs = ev.cwiseAbs().maxCoeff();
    std::size_t near = 0;
    for (double l : r.eigenvalues) {
        if (top > 0.0 && l > rank_tol * top) {
            ++r.rank;
        }
        if (top_abs == 0.0 || std::abs(l) < near_zero_tol * top_abs) {
            ++near;
        }
    }
    r.near_zero_fraction = static_cast<double>(near) / static_cast<double>(r.eigenvalues.size());
    r.histogram_edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        r.histogram_edges[b] = static_cast<double>(b) / static_cast<double>(bins);
    }
    r.histogram.assign(bins, 0);
    for (double l : r.eigenvalues) {
        const double v = top > 0.0 ? std::clamp(l / top, 0.0, 1.0) : 0.0;
        const auto b = std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)));
        ++r.histogram[b];
    }
    return r;
}

double block_structure(const Eigen::MatrixXd &F, std::size_t split) {
    if (F.rows() != F.cols()) {
        throw ArgumentError("matrix must be square");
    }
    const auto n = static_cast<std::size_t>(F.rows());
    if (split == 0 || split >= n) {
        throw ArgumentError("block split must lie strictly inside the matrix");
    }
    const auto a = static_cast<Eigen::Index>(split);
    const auto b = static_cast<Eigen::Index>(n - split);
    const double diag = std::hypot(F.topLeftCorner(a, a).norm(), F.bottomRightCorner(b, b).norm());
    const double off = std::hypot(F.topRightCorner(a, b).norm(), F.bottomLeftCorner(b, a).norm());
    if (diag == 0.0) {
        return off == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return off / diag;
}

std::string fisher_csv(const FisherMatrix &fisher, const SpectrumReport &report) {
    std::string out = "section,i,j,value\n";
    char buf[128];
    auto row = [&](const char *section, long long i, long long j, double v) {
        std::snprintf(buf, sizeof buf, "%s,%lld,%lld,%.17g\n", section, i, j, v);
        out += buf;
    };
    for (Eigen::Index i = 0; i < fisher.F.rows(); ++i) {
        for (Eigen::Index j = 0; j < fisher.F.cols(); ++j) {
            row("matrix", i, j, fisher.F(i, j));
        }
    }
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        row("eigenvalue", static_cast<long long>(i), 0, report.eigenvalues[i]);
    }
    for (std::size_t b = 0; b < report.histogram.size(); ++b) {
        row("histogram", static_cast<long long>(b), 0, static_cast<double>(report.histogram[b]));
    }
    row("summary_N", 0, 0, fisher.N);
    row("summary_K", 0, 0, fisher.K);
    row("summary_rank", 0, 0, static_cast<double>(report.rank));
    row("summary_near_zero_fraction", 0, 0, report.near_zero_fraction);
    row("summary_clamped", 0, 0, static_cast<double>(fisher.clamped));
    return out;
}

} // namespace evac::analysis
