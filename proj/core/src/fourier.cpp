#include "evac/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <array>
#include <numbers>
#include <random>

#include "evac/error.hpp"
#include "evac/parallel.hpp"
#include "evac/quantum_film.hpp"

namespace evac::analysis {

void MiniCircuitConfig::validate() const {
    if (N < 1 || K < 1) {
        throw ArgumentError("mini circuit needs N >= 1 and K >= 1");
    }
    if (N > 8 || K > 16) {
        throw ArgumentError("mini circuit N or K too large");
    }
    if (observable_qubit > 1) {
        throw ArgumentError("observable must be a FiLM qubit (0 or 1)");
    }
}

qsim::Circuit mini_circuit(const MiniCircuitConfig &config) {
    config.validate();
    using qsim::AngleRef;
    const auto per_block = static_cast<std::size_t>(2 * config.N);
    const auto sub = static_cast<std::size_t>(config.N);
    qsim::Circuit c(3);
    qsim::append_bel(c, 0, 0, 2, sub);
    for (int l = 1; l <= config.K; ++l) {
        c.rz(0, AngleRef::feature(0));
        c.rz(1, AngleRef::feature(1));
        qsim::append_bel(c, static_cast<std::size_t>(l) * per_block, 0, 2, sub);
    }
    const auto m = config.film_parameter_count();
    c.ry(2, AngleRef::parameter(m));
    c.rz(2, AngleRef::feature(2));
    c.ry(2, AngleRef::parameter(m + 1));
    c.rz(2, AngleRef::feature(3));
    c.ry(2, AngleRef::parameter(m + 2));
    c.cnot(0, 2);
    c.cnot(1, 2);
    c.ry(2, AngleRef::parameter(m + 3));
    c.measure({0, 1, 2});
    return c;
}

std::complex<double> FourierTable::at(int wx, int wy) const {
    if (std::abs(wx) > degree || std::abs(wy) > degree) {
        throw ArgumentError("frequency outside the table");
    }
    return coeffs[static_cast<std::size_t>(wx + degree) * side() + static_cast<std::size_t>(wy + degree)];
}

FourierTable fourier_coefficients(const std::function<double(double, double)> &f, int degree, std::size_t grid) {
    if (degree < 0) {
        throw ArgumentError("degree must be non-negative");
    }
    const auto minimum = static_cast<std::size_t>(2 * degree + 1);
    if (grid == 0) {
        grid = minimum;
    }
    if (grid < minimum) {
        throw ArgumentError("grid of " + std::to_string(grid) + " points aliases degree " + std::to_string(degree) +
                            "; need at least " + std::to_string(minimum));
    }
    const double step = 2.0 * std::numbers::pi / static_cast<double>(grid);
    std::vector<double> values(grid * grid);
    for (std::size_t a = 0; a < grid; ++a) {
        for (std::size_t b = 0; b < grid; ++b) {
            values[a * grid + b] = f(step * static_cast<double>(a), step * static_cast<double>(b));
        }
    }
    // Separable DFT: first along y, then along x.
    FourierTable t;
    t.degree = degree;
    const auto side = t.side();
    const auto g = static_cast<long long>(grid);
    auto phase = [&](int w, std::size_t k) {
        // exp(+i w x_k), reduced mod the grid so large products stay exact
        const auto r = ((static_cast<long long>(w) * static_cast<long long>(k)) % g + g) % g;
        const double ang = step * static_cast<double>(r);
        return std::complex<double>(std::cos(ang), std::sin(ang));
    };
    std::vector<std::complex<double>> partial(grid * side);
    for (std::size_t a = 0; a < grid; ++a) {
        for (int wy = -degree; wy <= degree; ++wy) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t b = 0; b < grid; ++b) {
                acc += values[a * grid + b] * phase(wy, b);
            }
            partial[a * side + static_cast<std::size_t>(wy + degree)] = acc;
        }
    }
    t.coeffs.assign(side * side, {0.0, 0.0});
    const double norm = 1.0 / static_cast<double>(grid * grid);
    for (int wx = -degree; wx <= degree; ++wx) {
        for (std::size_t a = 0; a < grid; ++a) {
            const auto ph = phase(wx, a);
            for (std::size_t j = 0; j < side; ++j) {
                t.coeffs[static_cast<std::size_t>(wx + degree) * side + j] += ph * partial[a * side + j] * norm;
            }
        }
    }
    return t;
}

FourierSampling sample_fourier(const MiniCircuitConfig &config, std::size_t n_theta, std::uint64_t seed,
                               const FourierOptions &options) {
    config.validate();
    if (n_theta < 1) {
        throw ArgumentError("n_theta must be at least 1");
    }
    FourierSampling out;
    out.config = config;
    out.degree = options.degree < 0 ? config.K : options.degree;
    out.grid = options.grid == 0 ? static_cast<std::size_t>(2 * out.degree + 1) : options.grid;
    const auto circuit = mini_circuit(config);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    out.thetas.resize(n_theta);
    for (auto &th : out.thetas) {
        th.resize(config.parameter_count());
        for (auto &v : th) {
            v = angle(rng);
        }
    }
    out.tables.resize(n_theta);
    const std::array<std::size_t, 1> observable{config.observable_qubit};
    parallel_for(n_theta, options.jobs, [&](std::size_t s) {
        const auto &th = out.thetas[s];
        auto f = [&](double x, double y) {
            const double feats[4] = {x, y, 0.0, 0.0};
            const auto state = qsim::simulate(circuit, th, feats);
            return qsim::z_expectations(state, observable)[0];
        };
        out.tables[s] = fourier_coefficients(f, out.degree, out.grid);
    });
    return out;
}

std::string fourier_violin_csv(const FourierSampling &sampling) {
    std::string out = "sample,wx,wy,re,im,abs\n";
    char buf[160];
    for (std::size_t s = 0; s < sampling.tables.size(); ++s) {
        const auto &t = sampling.tables[s];
        for (int wx = -t.degree; wx <= t.degree; ++wx) {
            for (int wy = -t.degree; wy <= t.degree; ++wy) {
                const auto c = t.at(wx, wy);
                std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g,%.17g,%.17g\n", s, wx, wy, c.real(), c.imag(),
                              std::abs(c));
                out += buf;
            }
        }
    }
    return out;
}

} // namespace evac::analysis
