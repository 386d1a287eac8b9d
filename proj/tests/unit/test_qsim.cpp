#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "evac/circuit.hpp"
#include "evac/error.hpp"
#include "evac/qasm.hpp"
#include "evac/quantum_film.hpp"
#include "evac/statevector.hpp"
#include "support.hpp"

using namespace evac;
using namespace evac::qsim;
using namespace testing_support;

namespace {

constexpr double kPi = std::numbers::pi;

// Dense state-vector register driven gate by gate with explicit matrices.
struct Dense {
    std::size_t n;
    CVector psi;

    explicit Dense(std::size_t n_) : n(n_), psi(CVector::Zero(Eigen::Index{1} << n_)) { psi(0) = 1.0; }
    void rx(std::size_t q, double a) { psi = single(n, q, rotation(GateKind::RX, a)) * psi; }
    void rz(std::size_t q, double a) { psi = single(n, q, rotation(GateKind::RZ, a)) * psi; }
    void cx(std::size_t c, std::size_t t) { psi = cnot_matrix(n, c, t) * psi; }
    void bel(std::size_t first, std::size_t width, std::size_t sublayers, const double *theta) {
        for (std::size_t s = 0; s < sublayers; ++s) {
            for (std::size_t q = 0; q < width; ++q) {
                rx(first + q, theta[s * width + q]);
            }
            if (width > 1) {
                for (std::size_t q = 0; q < width; ++q) {
                    cx(first + q, first + (q + 1) % width);
                }
            }
        }
    }
};

// Whole model written out from the layer description: FiLM on qubits 0-1,
// QDIL on 2-6, bridge CNOTs, closing BEL, <Z> on 2-6.
std::vector<double> dense_model(std::span<const double> main, std::span<const double> epi,
                                std::span<const double> p) {
    Dense d(7);
    d.bel(0, 2, 4, &p[0]);
    for (int l = 1; l <= 5; ++l) {
        d.rz(0, kPi * epi[0]);
        d.rz(1, kPi * epi[1]);
        d.bel(0, 2, 4, &p[8 * l]);
    }
    d.bel(2, 5, 4, &p[48]);
    for (std::size_t l = 0; l < 7; ++l) {
        for (std::size_t q = 0; q < 5; ++q) {
            const auto slot = l * 5 + q;
            d.rz(2 + q, slot < main.size() ? kPi * main[slot] : 0.0);
        }
        d.bel(2, 5, 4, &p[48 + 20 * (l + 1)]);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t t = 0; t < 5; ++t) {
            d.cx(c, 2 + t);
        }
    }
    d.bel(2, 5, 4, &p[208]);
    const std::size_t qs[] = {2, 3, 4, 5, 6};
    return dense_z(d.psi, 7, qs);
}

struct Draw {
    std::vector<double> main, epi, params;
};

Draw random_draw(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return {uniform_vector(34, rng, -1.0, 1.0), uniform_vector(2, rng, 0.0, 1.0),
            uniform_vector(228, rng, 0.0, 2 * kPi)};
}

// Minimal reader for the exporter's output.
struct ParsedQasm {
    std::size_t n_qubits = 0, n_bits = 0;
    std::vector<std::pair<std::size_t, double>> rx, ry, rz;
    std::vector<std::pair<std::size_t, std::size_t>> cx;
    std::vector<std::size_t> h;
    std::vector<std::size_t> measured;
    Circuit rebuild() const;
    std::vector<Gate> order;
};

ParsedQasm parse_qasm(const std::string &text) {
    ParsedQasm out;
    std::istringstream in(text);
    std::string line;
    const std::regex rot(R"(^(rx|ry|rz)\(([^)]+)\) q\[(\d+)\];$)");
    const std::regex cx(R"(^cx q\[(\d+)\], q\[(\d+)\];$)");
    const std::regex hh(R"(^h q\[(\d+)\];$)");
    const std::regex qreg(R"(^qubit\[(\d+)\] q;$)");
    const std::regex creg(R"(^bit\[(\d+)\] c;$)");
    const std::regex meas(R"(^c\[(\d+)\] = measure q\[(\d+)\];$)");
    std::smatch m;
    std::getline(in, line);
    EXPECT_EQ(line, "OPENQASM 3.0;");
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("include", 0) == 0) {
            continue;
        }
        if (std::regex_match(line, m, qreg)) {
            out.n_qubits = std::stoul(m[1]);
        } else if (std::regex_match(line, m, creg)) {
            out.n_bits = std::stoul(m[1]);
        } else if (std::regex_match(line, m, rot)) {
            const auto q = std::stoul(m[3]);
            const double a = std::stod(m[2]);
            const auto kind = m[1] == "rx" ? GateKind::RX : m[1] == "ry" ? GateKind::RY : GateKind::RZ;
            (kind == GateKind::RX ? out.rx : kind == GateKind::RY ? out.ry : out.rz).emplace_back(q, a);
            out.order.push_back({kind, q, 0, AngleRef::constant(a)});
        } else if (std::regex_match(line, m, cx)) {
            out.cx.emplace_back(std::stoul(m[1]), std::stoul(m[2]));
            out.order.push_back({GateKind::CNOT, std::stoul(m[2]), std::stoul(m[1]), {}});
        } else if (std::regex_match(line, m, hh)) {
            out.h.push_back(std::stoul(m[1]));
            out.order.push_back({GateKind::H, std::stoul(m[1]), 0, {}});
        } else if (std::regex_match(line, m, meas)) {
            EXPECT_EQ(std::stoul(m[1]), out.measured.size());
            out.measured.push_back(std::stoul(m[2]));
        } else {
            ADD_FAILURE() << "unrecognized line: " << line;
        }
    }
    return out;
}

Circuit ParsedQasm::rebuild() const {
    Circuit c(n_qubits);
    for (const auto &g : order) {
        switch (g.kind) {
        case GateKind::RX:
            c.rx(g.target, g.angle);
            break;
        case GateKind::RY:
            c.ry(g.target, g.angle);
            break;
        case GateKind::RZ:
            c.rz(g.target, g.angle);
            break;
        case GateKind::H:
            c.h(g.target);
            break;
        case GateKind::CNOT:
            c.cnot(g.control, g.target);
            break;
        }
    }
    c.measure(measured);
    return c;
}

} // namespace

TEST(Gates, RxExpectation) {
    for (double th : {0.0, 0.3, 1.0, kPi / 2, 2.5, kPi}) {
        StateVector s(1);
        s.apply_rx(0, th);
        EXPECT_NEAR(s.expectation_z(0), std::cos(th), 1e-15);
    }
}

TEST(Gates, CnotFlipsTargetWhenControlSet) {
    auto s = StateVector::basis(2, 0b10);
    s.apply_cnot(0, 1);
    EXPECT_NEAR(std::abs(s[0b11]), 1.0, 1e-15);
    auto t = StateVector::basis(2, 0b01);
    t.apply_cnot(0, 1);
    EXPECT_NEAR(std::abs(t[0b01]), 1.0, 1e-15);
    EXPECT_THROW(t.apply_cnot(1, 1), ArgumentError);
}

TEST(Gates, EachKindMatchesDenseMatrix) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        Circuit c(3);
        const auto a = uniform_vector(6, rng, -4, 4);
        c.rx(0, AngleRef::parameter(0)).ry(1, AngleRef::parameter(1)).rz(2, AngleRef::parameter(2));
        c.h(0).cnot(0, 2).cnot(2, 1).rx(1, AngleRef::parameter(3)).ry(2, AngleRef::parameter(4));
        c.rz(0, AngleRef::parameter(5)).measure({0, 1, 2});
        const auto u = dense_unitary(c, a, {});
        const auto s = simulate(c, a, {});
        for (Eigen::Index i = 0; i < 8; ++i) {
            ASSERT_NEAR(std::abs(s[static_cast<std::size_t>(i)] - u(i, 0)), 0.0, 1e-13);
        }
    }
}

TEST(StateVector, TensorAndAmplitudeValidation) {
    auto a = StateVector(1);
    a.apply_rx(0, kPi);
    const auto t = StateVector::tensor(a, StateVector(2));
    EXPECT_NEAR(std::abs(t[0b100]), 1.0, 1e-15);
    EXPECT_THROW((void)StateVector::from_amplitudes({1.0, 0.0, 0.0}), ArgumentError);
    EXPECT_THROW((void)StateVector(0), ArgumentError);
}

TEST(Bel, MatchesDenseOracle) {
    std::mt19937_64 rng(5);
    for (std::size_t width : {1u, 2u, 5u}) {
        const auto th = uniform_vector(4 * width, rng, 0, 2 * kPi);
        StateVector s(width);
        bel_layer(s, th);
        Dense d(width);
        d.bel(0, width, 4, th.data());
        for (std::size_t i = 0; i < s.dim(); ++i) {
            ASSERT_NEAR(std::abs(s[i] - d.psi(static_cast<Eigen::Index>(i))), 0.0, 1e-12);
        }
    }
    StateVector s(3);
    EXPECT_THROW(bel_layer(s, std::vector<double>(4, 0.0)), ArgumentError);
}

TEST(Bel, WidthOneHasNoCnot) {
    Circuit c(1);
    append_bel(c, 0, 0, 1, 4);
    EXPECT_EQ(c.census().cx, 0u);
    EXPECT_EQ(c.census().rx, 4u);
}

TEST(FilmSection, MatchesDenseOracle) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 5; ++trial) {
        const auto th = uniform_vector(48, rng, 0, 2 * kPi);
        const auto xy = uniform_vector(2, rng, 0, kPi);
        const auto s = film_section(xy[0], xy[1], th);
        Dense d(2);
        d.bel(0, 2, 4, &th[0]);
        for (int l = 1; l <= 5; ++l) {
            d.rz(0, xy[0]);
            d.rz(1, xy[1]);
            d.bel(0, 2, 4, &th[8 * l]);
        }
        for (std::size_t i = 0; i < 4; ++i) {
            ASSERT_NEAR(std::abs(s[i] - d.psi(static_cast<Eigen::Index>(i))), 0.0, 1e-12);
        }
    }
}

TEST(QdilSection, MatchesDenseOracleWithPadding) {
    std::mt19937_64 rng(7);
    for (std::size_t n_feat : {34u, 10u}) {
        const auto th = uniform_vector(160, rng, 0, 2 * kPi);
        const auto x = uniform_vector(n_feat, rng, 0, kPi);
        const auto s = qdil_section(x, th);
        Dense d(5);
        d.bel(0, 5, 4, &th[0]);
        for (std::size_t l = 0; l < 7; ++l) {
            for (std::size_t q = 0; q < 5; ++q) {
                const auto slot = l * 5 + q;
                d.rz(q, slot < n_feat ? x[slot] : 0.0);
            }
            d.bel(0, 5, 4, &th[20 * (l + 1)]);
        }
        for (std::size_t i = 0; i < 32; ++i) {
            ASSERT_NEAR(std::abs(s[i] - d.psi(static_cast<Eigen::Index>(i))), 0.0, 1e-12);
        }
    }
    EXPECT_THROW((void)qdil_section(std::vector<double>(35, 0.0), std::vector<double>(160, 0.0)), ArgumentError);
}

TEST(QuantumFilm, FullModelMatchesDenseOracle) {
    const QuantumFilm model;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto d = random_draw(seed);
        const auto got = model.forward(d.main, d.epi, d.params);
        const auto want = dense_model(d.main, d.epi, d.params);
        ASSERT_EQ(got.size(), 5u);
        for (std::size_t k = 0; k < 5; ++k) {
            EXPECT_NEAR(got[k], want[k], 1e-10);
            EXPECT_LE(std::abs(got[k]), 1.0 + 1e-12);
        }
        const auto ff = full_forward(d.main, d.epi, d.params);
        EXPECT_EQ(ff, got);
    }
}

TEST(QuantumFilm, ParameterCountsAndLayout) {
    const QuantumFilmConfig cfg;
    EXPECT_EQ(cfg.film_parameter_count(), 48u);
    EXPECT_EQ(cfg.qdil_parameter_count(), 160u);
    EXPECT_EQ(cfg.final_parameter_count(), 20u);
    EXPECT_EQ(cfg.parameter_count(), 228u);
    const QuantumFilm model;
    EXPECT_EQ(model.parameter_count(), 228u);
    EXPECT_EQ(model.circuit().n_qubits(), 7u);
    EXPECT_EQ(model.circuit().parameter_count(), 228u);
    EXPECT_NO_THROW(model.circuit().require_single_use_parameters());
    const auto census = model.circuit().census();
    EXPECT_EQ(census.rx, 228u);
    EXPECT_EQ(census.rz, 10u + 35u);
    EXPECT_EQ(census.cx, 48u + 160u + 10u + 20u);
    EXPECT_EQ(census.ry + census.h, 0u);
    EXPECT_EQ(model.circuit().measured(), (std::vector<std::size_t>{2, 3, 4, 5, 6}));
    QuantumFilmConfig bad;
    bad.repeats = 2;
    EXPECT_THROW(bad.validate(), ArgumentError);
    bad = {};
    bad.qdil_subvectors = 6;
    EXPECT_THROW(bad.validate(), ArgumentError);
}

TEST(QuantumFilm, AllZeroInputsGiveAllOnes) {
    const QuantumFilm model;
    const std::vector<double> main(34, 0.0), epi(2, 0.0), p(228, 0.0);
    for (double v : model.forward(main, epi, p)) {
        EXPECT_NEAR(v, 1.0, 1e-14);
    }
}

TEST(QuantumFilm, RejectsWrongSizes) {
    const QuantumFilm model;
    const auto d = random_draw(1);
    EXPECT_THROW((void)model.forward(std::vector<double>(33, 0.0), d.epi, d.params), ArgumentError);
    EXPECT_THROW((void)model.forward(d.main, std::vector<double>(1, 0.0), d.params), ArgumentError);
    EXPECT_THROW((void)model.forward(d.main, d.epi, std::vector<double>(227, 0.0)), ArgumentError);
}

TEST(QuantumFilm, NormPreserved) {
    const QuantumFilm model;
    const auto d = random_draw(9);
    const auto s = simulate(model.circuit(), d.params, model.circuit_features(d.main, d.epi));
    EXPECT_NEAR(s.squared_norm(), 1.0, 1e-12);
}

TEST(Simulator, NormDriftOverLongRandomCircuit) {
    std::mt19937_64 rng(12);
    Circuit c(7);
    std::uniform_int_distribution<std::size_t> q(0, 6), kind(0, 3);
    for (int i = 0; i < 10000; ++i) {
        const auto a = q(rng);
        switch (kind(rng)) {
        case 0:
            c.rx(a, AngleRef::constant(1.234 + i));
            break;
        case 1:
            c.ry(a, AngleRef::constant(0.77 * i));
            break;
        case 2:
            c.rz(a, AngleRef::constant(-0.1 * i));
            break;
        default:
            c.cnot(a, (a + 1 + q(rng) % 6) % 7);
        }
    }
    const auto s = simulate(c, {}, {});
    EXPECT_NEAR(s.squared_norm(), 1.0, 1e-10);
}

TEST(ShiftRule, SingleQubitExamples) {
    Circuit c(1);
    c.rx(0, AngleRef::parameter(0)).measure({0});
    const double at_half_pi[] = {kPi / 2};
    const double at_zero[] = {0.0};
    EXPECT_NEAR(param_shift_grad(c, at_half_pi, {}, 0)[0], -1.0, 1e-15);
    EXPECT_NEAR(param_shift_grad(c, at_zero, {}, 0)[0], 0.0, 1e-15);
}

TEST(ShiftRule, MatchesFiniteDifferences) {
    const QuantumFilm model;
    const auto d = random_draw(3);
    const auto feats = model.circuit_features(d.main, d.epi);
    const double h = 1e-5;
    for (std::size_t p : {0u, 7u, 47u, 48u, 100u, 207u, 208u, 227u}) {
        const auto g = param_shift_grad(model.circuit(), d.params, feats, p);
        auto plus = d.params, minus = d.params;
        plus[p] += h;
        minus[p] -= h;
        const auto fp = model.forward(d.main, d.epi, plus);
        const auto fm = model.forward(d.main, d.epi, minus);
        for (std::size_t k = 0; k < 5; ++k) {
            EXPECT_NEAR(g[k], (fp[k] - fm[k]) / (2 * h), 1e-7) << "param " << p << " output " << k;
        }
    }
}

TEST(ShiftRule, StructuredJacobianMatchesNaive) {
    const QuantumFilm model;
    const auto d = random_draw(4);
    const auto ev = model.evaluate(d.main, d.epi, d.params, true);
    ASSERT_EQ(ev.jacobian.size(), 228u * 5u);
    EXPECT_EQ(ev.values, model.forward(d.main, d.epi, d.params));
    const auto feats = model.circuit_features(d.main, d.epi);
    for (std::size_t p = 0; p < 228; p += 11) {
        const auto g = param_shift_grad(model.circuit(), d.params, feats, p);
        for (std::size_t k = 0; k < 5; ++k) {
            ASSERT_NEAR(ev.jacobian[p * 5 + k], g[k], 1e-12);
        }
    }
}

TEST(Adjoint, MatchesShiftJacobianContraction) {
    const QuantumFilm model;
    std::mt19937_64 rng(17);
    for (std::uint64_t seed = 10; seed < 13; ++seed) {
        const auto d = random_draw(seed);
        const auto up = uniform_vector(5, rng, -2, 2);
        const auto ev = model.evaluate(d.main, d.epi, d.params, true);
        const auto v = model.vjp(d.main, d.epi, d.params, up);
        ASSERT_EQ(v.size(), 228u);
        for (std::size_t p = 0; p < 228; ++p) {
            double want = 0;
            for (std::size_t k = 0; k < 5; ++k) {
                want += ev.jacobian[p * 5 + k] * up[k];
            }
            ASSERT_NEAR(v[p], want, 1e-12);
        }
    }
}

TEST(Adjoint, HandlesSharedParametersAndScales) {
    // one slot drives two gates with scale 2 and -1
    Circuit c(2);
    c.ry(0, AngleRef::parameter(0, 2.0)).cnot(0, 1).rx(1, AngleRef::parameter(0, -1.0));
    c.rz(0, AngleRef::parameter(1)).ry(0, AngleRef::feature(0)).measure({0, 1});
    const double p[] = {0.4, 1.1};
    const double f[] = {0.3};
    const double up[] = {1.0, -0.5};
    std::vector<double> vals;
    const auto g = adjoint_vjp(c, p, f, up, &vals);
    EXPECT_EQ(vals, expectations(c, p, f));
    for (std::size_t i = 0; i < 2; ++i) {
        const auto j = param_shift_grad(c, p, f, i);
        EXPECT_NEAR(g[i], up[0] * j[0] + up[1] * j[1], 1e-13);
    }
}

TEST(Simulator, GlobalPhaseDoesNotChangeExpectations) {
    const QuantumFilm model;
    const auto d = random_draw(5);
    auto s = simulate(model.circuit(), d.params, model.circuit_features(d.main, d.epi));
    const auto before = z_expectations(s, model.circuit().measured());
    s.apply_global_phase(0.987);
    const auto after = z_expectations(s, model.circuit().measured());
    for (std::size_t k = 0; k < before.size(); ++k) {
        EXPECT_NEAR(before[k], after[k], 1e-15);
    }
}

TEST(Sampling, ShotEstimateWithinThreeStandardErrors) {
    StateVector s(2);
    s.apply_rx(0, 1.0);
    s.apply_ry(1, 2.2);
    std::mt19937_64 rng(77);
    const std::size_t shots = 1000000;
    const auto counts = sample_counts(s, shots, rng);
    for (std::size_t q = 0; q < 2; ++q) {
        const double exact = s.expectation_z(q);
        const double se = std::sqrt((1 - exact * exact) / static_cast<double>(shots));
        EXPECT_NEAR(sampled_expectation_z(counts, 2, q), exact, 3 * se);
    }
    EXPECT_THROW((void)sampled_expectation_z(counts, 3, 0), ArgumentError);
}

TEST(Binding, MissingSlotsThrow) {
    Circuit c(1);
    c.rx(0, AngleRef::parameter(2)).measure({0});
    EXPECT_THROW((void)simulate(c, std::vector<double>(2, 0.0), {}), BindingError);
    EXPECT_THROW((void)export_qasm3(c, std::vector<double>(1, 0.0), {}), BindingError);
}

TEST(Qasm, CensusAndRoundTrip) {
    const QuantumFilm model;
    const auto d = random_draw(6);
    const auto feats = model.circuit_features(d.main, d.epi);
    const auto text = export_qasm3(model.circuit(), d.params, feats);
    const auto parsed = parse_qasm(text);
    EXPECT_EQ(parsed.n_qubits, 7u);
    EXPECT_EQ(parsed.n_bits, 5u);
    const auto census = model.circuit().census();
    EXPECT_EQ(parsed.rx.size(), census.rx);
    EXPECT_EQ(parsed.rz.size(), census.rz);
    EXPECT_EQ(parsed.cx.size(), census.cx);
    EXPECT_EQ(parsed.measured, model.circuit().measured());
    const auto again = parsed.rebuild();
    const auto a = expectations(again, {}, {});
    const auto b = model.forward(d.main, d.epi, d.params);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(a[k], b[k], 1e-13);
    }
    EXPECT_NE(text.find("include \"stdgates.inc\";"), std::string::npos);
}
