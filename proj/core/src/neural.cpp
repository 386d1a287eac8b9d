#include "evac/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "evac/error.hpp"

namespace evac {

std::size_t TensorSpec::size() const noexcept {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void FilmNetConfig::validate() const {
    if (n_in == 0 || hidden == 0 || n_out == 0 || n_film == 0) {
        throw ArgumentError("FiLM network dimensions must be positive");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        throw ArgumentError("dropout rate must lie in [0, 1)");
    }
}

FilmNet::FilmNet(FilmNetConfig config) : config_(config) {
    config_.validate();
    auto add = [this](std::string name, std::vector<std::size_t> shape) {
        TensorSpec s{std::move(name), std::move(shape), n_params_};
        n_params_ += s.size();
        specs_.push_back(s);
        return s.offset;
    };
    const auto h = config_.hidden;
    w1_ = add("net.w1", {h, config_.n_in});
    b1_ = add("net.b1", {h});
    w2_ = add("net.w2", {h, h});
    b2_ = add("net.b2", {h});
    wg_ = add("net.film_gamma.w", {h, config_.n_film});
    bg_ = add("net.film_gamma.b", {h});
    wb_ = add("net.film_beta.w", {h, config_.n_film});
    bb_ = add("net.film_beta.b", {h});
    w3_ = add("net.w3", {config_.n_out, h});
    b3_ = add("net.b3", {config_.n_out});
}

const TensorSpec &FilmNet::spec(const std::string &name) const {
    for (const auto &s : specs_) {
        if (s.name == name) {
            return s;
        }
    }
    throw NotFoundError("no tensor named " + name);
}

void FilmNet::init(std::span<double> params, std::uint64_t seed) const {
    check_params(params);
    std::mt19937_64 rng(seed);
    std::fill(params.begin(), params.end(), 0.0);
    for (const auto &s : specs_) {
        if (s.shape.size() != 2) {
            continue;
        }
        const double bound = std::sqrt(6.0 / static_cast<double>(s.shape[1]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < s.size(); ++i) {
            params[s.offset + i] = dist(rng);
        }
    }
    std::fill_n(params.begin() + static_cast<std::ptrdiff_t>(bg_), config_.hidden, 1.0);
}

void FilmNet::check_params(std::span<const double> params) const {
    if (params.size() != n_params_) {
        throw ArgumentError("FiLM network expects " + std::to_string(n_params_) + " parameters, got " +
                            std::to_string(params.size()));
    }
}

namespace {

// y = W x + b, W row-major (rows x cols)
void affine(const double *w, const double *b, std::span<const double> x, std::size_t rows, std::vector<double> &y) {
    const auto cols = x.size();
    y.assign(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double *row = w + r * cols;
        double acc = b[r];
        for (std::size_t c = 0; c < cols; ++c) {
            acc += row[c] * x[c];
        }
        y[r] = acc;
    }
}

void dropout_mask(std::vector<double> &mask, std::size_t n, double rate, std::mt19937_64 *rng) {
    mask.assign(n, 1.0);
    if (rng == nullptr || rate == 0.0) {
        return;
    }
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    for (auto &m : mask) {
        m = keep(*rng) ? scale : 0.0;
    }
}

} // namespace

std::vector<double> FilmNet::forward(std::span<const double> params, std::span<const double> x,
                                     std::span<const double> epi, Cache *cache, std::mt19937_64 *dropout_rng) const {
    check_params(params);
    if (x.size() != config_.n_in || epi.size() != config_.n_film) {
        throw ArgumentError("FiLM network expects " + std::to_string(config_.n_in) + " main and " +
                            std::to_string(config_.n_film) + " FiLM inputs");
    }
    Cache local;
    Cache &c = cache != nullptr ? *cache : local;
    const double *p = params.data();
    const auto h = config_.hidden;
    c.x.assign(x.begin(), x.end());
    c.epi.assign(epi.begin(), epi.end());

    affine(p + w1_, p + b1_, x, h, c.z1);
    dropout_mask(c.mask1, h, config_.dropout, dropout_rng);
    c.h1.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        c.h1[i] = std::max(c.z1[i], 0.0) * c.mask1[i];
    }
    affine(p + w2_, p + b2_, c.h1, h, c.z2);
    c.h2.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        c.h2[i] = std::max(c.z2[i], 0.0);
    }
    affine(p + wg_, p + bg_, epi, h, c.gamma);
    affine(p + wb_, p + bb_, epi, h, c.beta);
    dropout_mask(c.mask2, h, config_.dropout, dropout_rng);
    c.m.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        c.m[i] = (c.gamma[i] * c.h2[i] + c.beta[i]) * c.mask2[i];
    }
    std::vector<double> out;
    affine(p + w3_, p + b3_, c.m, config_.n_out, out);
    c.valid = true;
    return out;
}

void FilmNet::backward(std::span<const double> params, const Cache &c, std::span<const double> dout,
                       std::span<double> grad) const {
    if (!c.valid) {
        throw StateError("backward called before forward");
    }
    check_params(params);
    if (grad.size() != n_params_ || dout.size() != config_.n_out) {
        throw ArgumentError("gradient buffer shape mismatch");
    }
    const double *p = params.data();
    double *g = grad.data();
    const auto h = config_.hidden;
    const auto n_in = config_.n_in;
    const auto n_film = config_.n_film;

    std::vector<double> dm(h, 0.0);
    for (std::size_t o = 0; o < config_.n_out; ++o) {
        const double d = dout[o];
        g[b3_ + o] += d;
        for (std::size_t i = 0; i < h; ++i) {
            g[w3_ + o * h + i] += d * c.m[i];
            dm[i] += d * p[w3_ + o * h + i];
        }
    }
    std::vector<double> dz2(h);
    for (std::size_t i = 0; i < h; ++i) {
        const double dpre = dm[i] * c.mask2[i]; // d(gamma*h2 + beta)
        const double dgamma = dpre * c.h2[i];
        g[bg_ + i] += dgamma;
        g[bb_ + i] += dpre;
        for (std::size_t k = 0; k < n_film; ++k) {
            g[wg_ + i * n_film + k] += dgamma * c.epi[k];
            g[wb_ + i * n_film + k] += dpre * c.epi[k];
        }
        dz2[i] = c.z2[i] > 0.0 ? dpre * c.gamma[i] : 0.0;
    }
    std::vector<double> dh1(h, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        const double d = dz2[r];
        if (d == 0.0) {
            continue;
        }
        g[b2_ + r] += d;
        for (std::size_t i = 0; i < h; ++i) {
            g[w2_ + r * h + i] += d * c.h1[i];
            dh1[i] += d * p[w2_ + r * h + i];
        }
    }
    for (std::size_t r = 0; r < h; ++r) {
        const double d = c.z1[r] > 0.0 ? dh1[r] * c.mask1[r] : 0.0;
        if (d == 0.0) {
            continue;
        }
        g[b1_ + r] += d;
        for (std::size_t i = 0; i < n_in; ++i) {
            g[w1_ + r * n_in + i] += d * c.x[i];
        }
    }
}

CrossEntropy cross_entropy(std::span<const double> logits, int label, std::span<const bool> mask) {
    if (mask.size() != logits.size()) {
        throw ArgumentError("mask and logits differ in length");
    }
    if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
        throw ArgumentError("label " + std::to_string(label) + " out of range");
    }
    if (!mask[static_cast<std::size_t>(label)]) {
        throw ArgumentError("label " + std::to_string(label) + " is masked");
    }
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            top = std::max(top, logits[i]);
        }
    }
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            z += std::exp(logits[i] - top);
        }
    }
    CrossEntropy ce;
    ce.grad.assign(logits.size(), 0.0);
    const double log_z = std::log(z) + top;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            ce.grad[i] = std::exp(logits[i] - log_z);
        }
    }
    const auto l = static_cast<std::size_t>(label);
    ce.loss = log_z - logits[l];
    ce.grad[l] -= 1.0;
    return ce;
}

CrossEntropy cross_entropy(std::span<const double> logits, int label) {
    auto mask = std::make_unique<bool[]>(logits.size());
    std::fill_n(mask.get(), logits.size(), true);
    return cross_entropy(logits, label, std::span<const bool>(mask.get(), logits.size()));
}

int masked_argmax(std::span<const double> logits, std::span<const bool> mask) {
    if (mask.size() != logits.size()) {
        throw ArgumentError("mask and logits differ in length");
    }
    int best = -1;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i] && (best < 0 || logits[i] > logits[static_cast<std::size_t>(best)])) {
            best = static_cast<int>(i);
        }
    }
    if (best < 0) {
        throw ArgumentError("every entry is masked");
    }
    return best;
}

} // namespace evac
