#include "evac/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "evac/error.hpp"
#include "evac/parallel.hpp"

namespace evac {

std::vector<double> HybridParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(size());
    for (const auto *v : {&net, &quantum, &head_w, &head_b}) {
        flat.insert(flat.end(), v->begin(), v->end());
    }
    return flat;
}

void HybridParams::assign(std::span<const double> flat) {
    if (flat.size() != size()) {
        throw ArgumentError("flat parameter vector has the wrong length");
    }
    auto it = flat.begin();
    for (auto *v : {&net, &quantum, &head_w, &head_b}) {
        std::copy_n(it, v->size(), v->begin());
        it += static_cast<std::ptrdiff_t>(v->size());
    }
}

void HybridParams::zero() {
    for (auto *v : {&net, &quantum, &head_w, &head_b}) {
        std::fill(v->begin(), v->end(), 0.0);
    }
}

HybridParams &HybridParams::operator+=(const HybridParams &other) {
    if (other.net.size() != net.size() || other.quantum.size() != quantum.size() ||
        other.head_w.size() != head_w.size() || other.head_b.size() != head_b.size()) {
        throw ArgumentError("parameter shapes differ");
    }
    auto add = [](std::vector<double> &a, const std::vector<double> &b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] += b[i];
        }
    };
    add(net, other.net);
    add(quantum, other.quantum);
    add(head_w, other.head_w);
    add(head_b, other.head_b);
    return *this;
}

HybridParams &HybridParams::operator*=(double s) {
    for (auto *v : {&net, &quantum, &head_w, &head_b}) {
        for (auto &x : *v) {
            x *= s;
        }
    }
    return *this;
}

HybridModel::HybridModel(HybridConfig config) : config_(config), net_(config.net), quantum_(config.quantum) {
    if (quantum_.output_count() != config_.net.n_out) {
        throw ArgumentError("quantum and classical branches must have the same output width");
    }
    if (config_.net.n_in != config_.quantum.main_features || config_.net.n_film != 2) {
        throw ArgumentError("branch input widths disagree");
    }
    if (!(config_.head_init >= 0.0)) {
        throw ArgumentError("head_init must be non-negative");
    }
}

HybridParams HybridModel::zeros(bool classical_only) const {
    HybridParams p;
    p.classical_only = classical_only;
    p.net.assign(net_.parameter_count(), 0.0);
    if (!classical_only) {
        p.quantum.assign(quantum_.parameter_count(), 0.0);
    }
    p.head_w.assign(n_out() * head_cols(), 0.0);
    p.head_b.assign(n_out(), 0.0);
    return p;
}

HybridParams HybridModel::init(std::uint64_t seed, bool classical_only) const {
    auto p = zeros(classical_only);
    net_.init(p.net, mix_seed(seed, 1));
    std::mt19937_64 rng(mix_seed(seed, 2));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (auto &q : p.quantum) {
        q = angle(rng);
    }
    std::uniform_real_distribution<double> head(-config_.head_init, config_.head_init);
    for (std::size_t o = 0; o < n_out(); ++o) {
        for (std::size_t j = 0; j < head_cols(); ++j) {
            const double w = head(rng);
            if (j < n_out() || !classical_only) {
                p.head_w[o * head_cols() + j] = w;
            }
        }
    }
    return p;
}

void HybridModel::validate(const HybridParams &p) const {
    if (p.net.size() != net_.parameter_count() || p.head_w.size() != n_out() * head_cols() ||
        p.head_b.size() != n_out()) {
        throw ArgumentError("hybrid parameters do not match the model shape");
    }
    if (p.classical_only ? !p.quantum.empty() : p.quantum.size() != quantum_.parameter_count()) {
        throw ArgumentError("quantum parameter count does not match the model");
    }
    for (const auto *v : {&p.net, &p.quantum, &p.head_w, &p.head_b}) {
        if (!std::all_of(v->begin(), v->end(), [](double x) { return std::isfinite(x); })) {
            throw ArgumentError("hybrid parameters contain non-finite values");
        }
    }
}

HybridModel::Output HybridModel::forward(const HybridParams &p, const FeatureVector &features) const {
    const auto main = main_features(features);
    const auto epi = film_features(features);
    Output out;
    out.classical = net_.forward(p.net, main, epi);
    out.quantum = p.classical_only ? std::vector<double>(n_out(), 0.0) : quantum_.forward(main, epi, p.quantum);
    out.logits.assign(p.head_b.begin(), p.head_b.end());
    const auto cols = head_cols();
    for (std::size_t o = 0; o < n_out(); ++o) {
        for (std::size_t j = 0; j < n_out(); ++j) {
            out.logits[o] += p.head_w[o * cols + j] * out.classical[j] + p.head_w[o * cols + n_out() + j] * out.quantum[j];
        }
    }
    return out;
}

double HybridModel::loss(const HybridParams &p, const Sample &sample) const {
    const auto mask = sample.mask();
    return cross_entropy(forward(p, sample.features).logits, sample.label, mask).loss;
}

double HybridModel::loss_and_grad(const HybridParams &p, const Sample &sample, HybridParams &grad,
                                  std::mt19937_64 *dropout_rng, QuantumGradient method) const {
    const auto main = main_features(sample.features);
    const auto epi = film_features(sample.features);
    const auto n = n_out();
    const auto cols = head_cols();

    FilmNet::Cache cache;
    const auto classical = net_.forward(p.net, main, epi, &cache, dropout_rng);
    qsim::QuantumFilm::Evaluation q;
    if (p.classical_only) {
        q.values.assign(n, 0.0);
    } else {
        q = quantum_.evaluate(main, epi, p.quantum, method == QuantumGradient::ParameterShift);
    }
    std::vector<double> logits(p.head_b.begin(), p.head_b.end());
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t j = 0; j < n; ++j) {
            logits[o] += p.head_w[o * cols + j] * classical[j] + p.head_w[o * cols + n + j] * q.values[j];
        }
    }
    const auto mask = sample.mask();
    const auto ce = cross_entropy(logits, sample.label, mask);

    std::vector<double> dc(n, 0.0), dq(n, 0.0);
    for (std::size_t o = 0; o < n; ++o) {
        const double g = ce.grad[o];
        grad.head_b[o] += g;
        for (std::size_t j = 0; j < n; ++j) {
            grad.head_w[o * cols + j] += g * classical[j];
            dc[j] += g * p.head_w[o * cols + j];
            if (!p.classical_only) {
                grad.head_w[o * cols + n + j] += g * q.values[j];
                dq[j] += g * p.head_w[o * cols + n + j];
            }
        }
    }
    net_.backward(p.net, cache, dc, grad.net);
    if (!p.classical_only && method == QuantumGradient::Adjoint) {
        const auto g = quantum_.vjp(main, epi, p.quantum, dq);
        for (std::size_t k = 0; k < g.size(); ++k) {
            grad.quantum[k] += g[k];
        }
    } else if (!p.classical_only) {
        for (std::size_t k = 0; k < p.quantum.size(); ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                acc += q.jacobian[k * n + j] * dq[j];
            }
            grad.quantum[k] += acc;
        }
    }
    return ce.loss;
}

double primacy_alpha(std::span<const double> head_w, std::size_t n_out) {
    if (n_out == 0 || head_w.size() != n_out * 2 * n_out) {
        throw ArgumentError("head must be " + std::to_string(n_out) + " x " + std::to_string(2 * n_out));
    }
    double c2 = 0.0, q2 = 0.0;
    for (std::size_t o = 0; o < n_out; ++o) {
        for (std::size_t j = 0; j < n_out; ++j) {
            const double c = head_w[o * 2 * n_out + j];
            const double q = head_w[o * 2 * n_out + n_out + j];
            if (!std::isfinite(c) || !std::isfinite(q)) {
                throw ArgumentError("head contains non-finite values");
            }
            c2 += c * c;
            q2 += q * q;
        }
    }
    const double nc = std::sqrt(c2);
    const double nq = std::sqrt(q2);
    if (nc + nq == 0.0) {
        throw ArgumentError("primacy is undefined for an all-zero head");
    }
    return nq / (nq + nc);
}

} // namespace evac
