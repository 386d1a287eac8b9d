#include "evac/quantum_film.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "evac/error.hpp"

namespace evac::qsim {

void QuantumFilmConfig::validate() const {
    if (n_film_qubits == 0 || n_main_qubits == 0 || bel_sublayers == 0 || qdil_subvectors == 0) {
        throw ArgumentError("quantum FiLM dimensions must be positive");
    }
    if (n_qubits() > kMaxQubits) {
        throw ArgumentError("quantum FiLM register too large");
    }
    if (main_slot_count() < main_features) {
        throw ArgumentError("n_main_qubits * qdil_subvectors must cover the main features");
    }
    if (repeats != 1) {
        throw ArgumentError("only a single stack repeat is supported");
    }
}

void append_bel(Circuit &circuit, std::size_t param_offset, std::size_t first_qubit, std::size_t width,
                std::size_t sublayers) {
    for (std::size_t s = 0; s < sublayers; ++s) {
        for (std::size_t q = 0; q < width; ++q) {
            circuit.rx(first_qubit + q, AngleRef::parameter(param_offset + s * width + q));
        }
        if (width < 2) {
            continue;
        }
        for (std::size_t q = 0; q < width; ++q) {
            circuit.cnot(first_qubit + q, first_qubit + (q + 1) % width);
        }
    }
}

void bel_layer(StateVector &state, std::span<const double> thetas) {
    const auto n = state.n_qubits();
    if (thetas.empty() || thetas.size() % n != 0) {
        throw ArgumentError("BEL needs sublayers * n_qubits angles, got " + std::to_string(thetas.size()));
    }
    Circuit c(n);
    append_bel(c, 0, 0, n, thetas.size() / n);
    run(c, state, thetas, {});
}

Circuit film_circuit(const QuantumFilmConfig &config, double feature_scale) {
    config.validate();
    const auto w = config.n_film_qubits;
    const auto per_layer = config.bel_sublayers * w;
    Circuit c(w);
    append_bel(c, 0, 0, w, config.bel_sublayers);
    for (std::size_t l = 1; l <= config.film_reuploads; ++l) {
        // Epicenter x on the first FiLM qubit, y on the second; further
        // qubits (if any) alternate.
        for (std::size_t q = 0; q < w; ++q) {
            c.rz(q, AngleRef::feature(q % 2, feature_scale));
        }
        append_bel(c, l * per_layer, 0, w, config.bel_sublayers);
    }
    c.measure({0});
    return c;
}

Circuit qdil_circuit(const QuantumFilmConfig &config, double feature_scale) {
    config.validate();
    const auto w = config.n_main_qubits;
    const auto per_layer = config.bel_sublayers * w;
    Circuit c(w);
    append_bel(c, 0, 0, w, config.bel_sublayers);
    for (std::size_t l = 0; l < config.qdil_subvectors; ++l) {
        for (std::size_t q = 0; q < w; ++q) {
            const auto slot = l * w + q;
            c.rz(q, slot < config.main_features ? AngleRef::feature(slot, feature_scale) : AngleRef::constant(0.0));
        }
        append_bel(c, (l + 1) * per_layer, 0, w, config.bel_sublayers);
    }
    std::vector<std::size_t> all(w);
    for (std::size_t q = 0; q < w; ++q) {
        all[q] = q;
    }
    c.measure(all);
    return c;
}

Circuit bridge_circuit(const QuantumFilmConfig &config) {
    config.validate();
    Circuit c(config.n_qubits());
    for (std::size_t ctl = 0; ctl < config.n_film_qubits; ++ctl) {
        for (std::size_t t = 0; t < config.n_main_qubits; ++t) {
            c.cnot(ctl, config.n_film_qubits + t);
        }
    }
    append_bel(c, 0, config.n_film_qubits, config.n_main_qubits, config.bel_sublayers);
    std::vector<std::size_t> main(config.n_main_qubits);
    for (std::size_t t = 0; t < main.size(); ++t) {
        main[t] = config.n_film_qubits + t;
    }
    c.measure(main);
    return c;
}

StateVector film_section(double x_angle, double y_angle, std::span<const double> thetas,
                         const QuantumFilmConfig &config) {
    if (thetas.size() != config.film_parameter_count()) {
        throw ArgumentError("FiLM section needs " + std::to_string(config.film_parameter_count()) +
                            " angles, got " + std::to_string(thetas.size()));
    }
    const double xy[2] = {x_angle, y_angle};
    return simulate(film_circuit(config), thetas, xy);
}

StateVector qdil_section(std::span<const double> angles, std::span<const double> thetas,
                         const QuantumFilmConfig &config) {
    if (thetas.size() != config.qdil_parameter_count()) {
        throw ArgumentError("QDIL section needs " + std::to_string(config.qdil_parameter_count()) +
                            " angles, got " + std::to_string(thetas.size()));
    }
    if (angles.size() > config.main_features) {
        throw ArgumentError("too many main features");
    }
    std::vector<double> padded(config.main_features, 0.0);
    std::copy(angles.begin(), angles.end(), padded.begin());
    return simulate(qdil_circuit(config), thetas, padded);
}

namespace {

void append_offset(Circuit &dst, const Circuit &src, std::size_t qubit_offset, std::size_t param_offset,
                   std::size_t feature_offset) {
    for (const auto &g : src.gates()) {
        AngleRef a = g.angle;
        if (a.source == AngleRef::Source::Parameter) {
            a.index += param_offset;
        } else if (a.source == AngleRef::Source::Feature) {
            a.index += feature_offset;
        }
        switch (g.kind) {
        case GateKind::RX:
            dst.rx(g.target + qubit_offset, a);
            break;
        case GateKind::RY:
            dst.ry(g.target + qubit_offset, a);
            break;
        case GateKind::RZ:
            dst.rz(g.target + qubit_offset, a);
            break;
        case GateKind::H:
            dst.h(g.target + qubit_offset);
            break;
        case GateKind::CNOT:
            dst.cnot(g.control + qubit_offset, g.target + qubit_offset);
            break;
        }
    }
}

constexpr double kShift = std::numbers::pi / 2.0;

// Row-major Hermitian form <a_i| O |a_j> for a diagonal Z observable.
std::vector<Amplitude> z_form(std::span<const StateVector> columns, std::size_t qubit) {
    const auto n = columns.size();
    const auto dim = columns[0].dim();
    const auto bit = std::size_t{1} << (columns[0].n_qubits() - 1 - qubit);
    std::vector<Amplitude> form(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            Amplitude acc{0.0, 0.0};
            const auto a = columns[i].amplitudes();
            const auto b = columns[j].amplitudes();
            for (std::size_t x = 0; x < dim; ++x) {
                const Amplitude term = std::conj(a[x]) * b[x];
                acc += (x & bit) ? -term : term;
            }
            form[i * n + j] = acc;
            form[j * n + i] = std::conj(acc);
        }
    }
    return form;
}

double quadratic(std::span<const Amplitude> form, std::span<const Amplitude> v) {
    const auto n = v.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Amplitude row{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            row += form[i * n + j] * v[j];
        }
        acc += (std::conj(v[i]) * row).real();
    }
    return acc;
}

} // namespace

QuantumFilm::QuantumFilm(QuantumFilmConfig config)
    : config_(config), film_(film_circuit(config, kFeatureAngleScale)),
      qdil_(qdil_circuit(config, kFeatureAngleScale)), bridge_(bridge_circuit(config)), full_(config.n_qubits()) {
    append_offset(full_, film_, 0, 0, 0);
    append_offset(full_, qdil_, config_.n_film_qubits, config_.film_parameter_count(), 2);
    append_offset(full_, bridge_, 0, config_.film_parameter_count() + config_.qdil_parameter_count(), 0);
    main_qubits_ = bridge_.measured();
    full_.measure(main_qubits_);
    full_.require_single_use_parameters();
}

std::vector<double> QuantumFilm::circuit_features(std::span<const double> main, std::span<const double> epi) const {
    if (epi.size() != 2 || main.size() != config_.main_features) {
        throw ArgumentError("quantum FiLM expects 2 FiLM and " + std::to_string(config_.main_features) +
                            " main features");
    }
    std::vector<double> f;
    f.reserve(2 + main.size());
    f.insert(f.end(), epi.begin(), epi.end());
    f.insert(f.end(), main.begin(), main.end());
    return f;
}

void QuantumFilm::check(std::span<const double> main, std::span<const double> epi,
                        std::span<const double> params) const {
    if (params.size() != parameter_count()) {
        throw ArgumentError("quantum FiLM expects " + std::to_string(parameter_count()) + " parameters, got " +
                            std::to_string(params.size()));
    }
    if (epi.size() != 2 || main.size() != config_.main_features) {
        throw ArgumentError("quantum FiLM expects 2 FiLM and " + std::to_string(config_.main_features) +
                            " main features");
    }
}

std::vector<double> QuantumFilm::forward(std::span<const double> main, std::span<const double> epi,
                                         std::span<const double> params) const {
    return evaluate(main, epi, params, false).values;
}

QuantumFilm::Evaluation QuantumFilm::evaluate(std::span<const double> main, std::span<const double> epi,
                                              std::span<const double> params, bool with_jacobian) const {
    check(main, epi, params);
    const auto n_film = config_.film_parameter_count();
    const auto n_qdil = config_.qdil_parameter_count();
    const auto film_params = params.subspan(0, n_film);
    const auto qdil_params = params.subspan(n_film, n_qdil);
    const auto bridge_params = params.subspan(n_film + n_qdil);
    const auto n_out = output_count();

    Evaluation out;
    if (!with_jacobian) {
        auto film = simulate(film_, film_params, epi);
        auto qdil = simulate(qdil_, qdil_params, main);
        auto state = StateVector::tensor(film, qdil);
        run(bridge_, state, bridge_params, {});
        out.values = z_expectations(state, main_qubits_);
        return out;
    }

    const auto film_prefix = simulate_prefixes(film_, film_params, epi);
    const auto qdil_prefix = simulate_prefixes(qdil_, qdil_params, main);
    const auto &film = film_prefix.back();
    const auto &qdil = qdil_prefix.back();
    // Bridge prefixes on the actual product state.
    std::vector<StateVector> joint;
    joint.reserve(bridge_.gates().size() + 1);
    {
        auto state = StateVector::tensor(film, qdil);
        for (const auto &gate : bridge_.gates()) {
            joint.push_back(state);
            apply_gate(state, gate, bridge_params, {});
        }
        joint.push_back(std::move(state));
    }
    out.values = z_expectations(joint.back(), main_qubits_);
    out.jacobian.assign(parameter_count() * n_out, 0.0);

    auto record = [&](std::size_t p, double scale, const std::vector<double> &plus, const std::vector<double> &minus) {
        for (std::size_t k = 0; k < n_out; ++k) {
            out.jacobian[p * n_out + k] += scale * 0.5 * (plus[k] - minus[k]);
        }
    };

    // Closing section: resume from the cached state before each gate.
    for (std::size_t g = 0; g < bridge_.gates().size(); ++g) {
        const auto &gate = bridge_.gates()[g];
        if (!is_rotation(gate.kind) || gate.angle.source != AngleRef::Source::Parameter) {
            continue;
        }
        auto plus = joint[g];
        run(bridge_, plus, bridge_params, {}, g, g, kShift);
        auto minus = joint[g];
        run(bridge_, minus, bridge_params, {}, g, g, -kShift);
        record(n_film + n_qdil + gate.angle.index, gate.angle.scale, z_expectations(plus, main_qubits_),
               z_expectations(minus, main_qubits_));
    }

    // The bridge is linear in each factor of the product state, so every
    // shifted section state maps to outputs through a fixed Hermitian form.
    auto propagate = [&](StateVector state) {
        run(bridge_, state, bridge_params, {});
        return state;
    };

    {
        std::vector<StateVector> columns;
        for (std::size_t j = 0; j < film.dim(); ++j) {
            columns.push_back(propagate(StateVector::tensor(StateVector::basis(film.n_qubits(), j), qdil)));
        }
        std::vector<std::vector<Amplitude>> forms;
        for (auto q : main_qubits_) {
            forms.push_back(z_form(columns, q));
        }
        auto outputs = [&](const StateVector &s) {
            std::vector<double> v(n_out);
            for (std::size_t k = 0; k < n_out; ++k) {
                v[k] = quadratic(forms[k], s.amplitudes());
            }
            return v;
        };
        for (std::size_t g = 0; g < film_.gates().size(); ++g) {
            const auto &gate = film_.gates()[g];
            if (!is_rotation(gate.kind) || gate.angle.source != AngleRef::Source::Parameter) {
                continue;
            }
            auto plus = film_prefix[g];
            run(film_, plus, film_params, epi, g, g, kShift);
            auto minus = film_prefix[g];
            run(film_, minus, film_params, epi, g, g, -kShift);
            record(gate.angle.index, gate.angle.scale, outputs(plus), outputs(minus));
        }
    }

    {
        const auto dim = qdil.dim();
        std::vector<StateVector> columns;
        columns.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            columns.push_back(propagate(StateVector::tensor(film, StateVector::basis(qdil.n_qubits(), j))));
        }
        const auto full_dim = columns[0].dim();
        std::vector<Amplitude> mixed(full_dim);
        auto outputs = [&](const StateVector &s) {
            std::fill(mixed.begin(), mixed.end(), Amplitude{0.0, 0.0});
            for (std::size_t j = 0; j < dim; ++j) {
                const Amplitude c = s[j];
                const auto col = columns[j].amplitudes();
                for (std::size_t x = 0; x < full_dim; ++x) {
                    mixed[x] += c * col[x];
                }
            }
            return z_expectations(StateVector::from_amplitudes(mixed), main_qubits_);
        };
        for (std::size_t g = 0; g < qdil_.gates().size(); ++g) {
            const auto &gate = qdil_.gates()[g];
            if (!is_rotation(gate.kind) || gate.angle.source != AngleRef::Source::Parameter) {
                continue;
            }
            auto plus = qdil_prefix[g];
            run(qdil_, plus, qdil_params, main, g, g, kShift);
            auto minus = qdil_prefix[g];
            run(qdil_, minus, qdil_params, main, g, g, -kShift);
            record(n_film + gate.angle.index, gate.angle.scale, outputs(plus), outputs(minus));
        }
    }
    return out;
}

std::vector<double> QuantumFilm::vjp(std::span<const double> main, std::span<const double> epi,
                                     std::span<const double> params, std::span<const double> upstream) const {
    check(main, epi, params);
    if (upstream.size() != output_count()) {
        throw ArgumentError("upstream gradient needs one entry per output");
    }
    return adjoint_vjp(full_, params, circuit_features(main, epi), upstream);
}

std::vector<double> full_forward(std::span<const double> main, std::span<const double> epi,
                                 std::span<const double> params) {
    static const QuantumFilm model{};
    return model.forward(main, epi, params);
}

} // namespace evac::qsim
