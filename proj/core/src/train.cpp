#include "evac/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "evac/error.hpp"
#include "evac/optim.hpp"
#include "evac/parallel.hpp"

namespace evac {

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw ArgumentError("epochs must be at least 1");
    }
    if (batch_size == 0 || chunks == 0) {
        throw ArgumentError("batch_size and chunks must be positive");
    }
    if (!(classical_lr >= 0.0) || !(quantum_lr >= 0.0) || !(weight_decay >= 0.0)) {
        throw ArgumentError("learning rates and weight decay must be non-negative");
    }
}

nlohmann::json train_config_to_json(const TrainConfig &c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"classical_lr", c.classical_lr},
            {"quantum_lr", c.quantum_lr},
            {"weight_decay", c.weight_decay},
            {"lr_start", c.lr_start},
            {"lr_end", c.lr_end},
            {"seed", c.seed},
            {"classical_only", c.classical_only},
            {"dropout", c.dropout},
            {"quantum_gradient", gradient_name(c.quantum_gradient)},
            {"chunks", c.chunks}};
}

TrainConfig train_config_from_json(const nlohmann::json &doc) {
    if (!doc.is_object()) {
        throw ArgumentError("training config must be a JSON object");
    }
    TrainConfig c;
    for (const auto &[key, value] : doc.items()) {
        try {
            if (key == "epochs") {
                c.epochs = value.get<int>();
            } else if (key == "batch_size") {
                c.batch_size = value.get<std::size_t>();
            } else if (key == "classical_lr") {
                c.classical_lr = value.get<double>();
            } else if (key == "quantum_lr") {
                c.quantum_lr = value.get<double>();
            } else if (key == "weight_decay") {
                c.weight_decay = value.get<double>();
            } else if (key == "lr_start") {
                c.lr_start = value.get<double>();
            } else if (key == "lr_end") {
                c.lr_end = value.get<double>();
            } else if (key == "seed") {
                c.seed = value.get<std::uint64_t>();
            } else if (key == "classical_only") {
                c.classical_only = value.get<bool>();
            } else if (key == "dropout") {
                c.dropout = value.get<bool>();
            } else if (key == "quantum_gradient") {
                c.quantum_gradient = parse_gradient(value.get<std::string>());
            } else if (key == "chunks") {
                c.chunks = value.get<std::size_t>();
            } else if (key == "jobs") {
                c.jobs = value.get<unsigned>();
            } else {
                throw ArgumentError("unknown training config key: " + key);
            }
        } catch (const nlohmann::json::exception &e) {
            throw ArgumentError("bad value for " + key + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

LossSummary evaluate_samples(const HybridModel &model, const HybridParams &params, std::span<const Sample> samples,
                             unsigned jobs) {
    LossSummary s;
    s.n = samples.size();
    if (samples.empty()) {
        return s;
    }
    std::vector<double> losses(samples.size());
    std::vector<char> hits(samples.size());
    parallel_for(samples.size(), jobs, [&](std::size_t i) {
        const auto &sample = samples[i];
        const auto logits = model.logits(params, sample.features);
        const auto mask = sample.mask();
        losses[i] = cross_entropy(logits, sample.label, mask).loss;
        hits[i] = masked_argmax(logits, mask) == sample.label ? 1 : 0;
    });
    const double n = static_cast<double>(samples.size());
    s.loss = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
    s.accuracy = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / n;
    return s;
}

namespace {

// Sum of per-sample gradients over batch indices, reduced in fixed slices.
double accumulate_batch(const HybridModel &model, const HybridParams &params, std::span<const Sample> samples,
                        std::span<const std::size_t> indices, std::size_t chunks, unsigned jobs,
                        std::uint64_t dropout_seed, bool dropout, QuantumGradient method, HybridParams &grad) {
    const auto n_chunks = std::min(chunks, indices.size());
    std::vector<HybridParams> partial(n_chunks, grad);
    std::vector<double> losses(n_chunks, 0.0);
    for (auto &p : partial) {
        p.zero();
    }
    parallel_for(n_chunks, jobs, [&](std::size_t c) {
        const auto lo = indices.size() * c / n_chunks;
        const auto hi = indices.size() * (c + 1) / n_chunks;
        for (auto k = lo; k < hi; ++k) {
            const auto idx = indices[k];
            if (dropout) {
                std::mt19937_64 rng(mix_seed(dropout_seed, idx));
                losses[c] += model.loss_and_grad(params, samples[idx], partial[c], &rng, method);
            } else {
                losses[c] += model.loss_and_grad(params, samples[idx], partial[c], nullptr, method);
            }
        }
    });
    double total = 0.0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        grad += partial[c];
        total += losses[c];
    }
    return total;
}

} // namespace

HybridParams batch_gradient(const HybridModel &model, const HybridParams &params, std::span<const Sample> batch,
                            double *mean_loss, QuantumGradient method) {
    if (batch.empty()) {
        throw ArgumentError("empty batch");
    }
    model.validate(params);
    auto grad = params;
    grad.zero();
    std::vector<std::size_t> idx(batch.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const double total = accumulate_batch(model, params, batch, idx, 1, 1, 0, false, method, grad);
    grad *= 1.0 / static_cast<double>(batch.size());
    if (mean_loss != nullptr) {
        *mean_loss = total / static_cast<double>(batch.size());
    }
    return grad;
}

TrainResult train(const HybridModel &model, std::span<const Sample> train_set, std::span<const Sample> validation_set,
                  const TrainConfig &config, const std::function<void(const EpochRecord &)> &on_epoch) {
    config.validate();
    if (train_set.empty()) {
        throw ArgumentError("training set is empty");
    }
    TrainResult result;
    result.params = model.init(config.seed, config.classical_only);
    auto &params = result.params;

    AdamConfig adam_cfg;
    adam_cfg.weight_decay = config.weight_decay;
    Adam adam_net(params.net.size(), adam_cfg);
    Adam adam_quantum(params.quantum.size(), adam_cfg);
    Adam adam_head_w(params.head_w.size(), adam_cfg);
    Adam adam_head_b(params.head_b.size(), adam_cfg);

    auto record = [&](int epoch, double lr_factor) {
        EpochRecord r;
        r.epoch = epoch;
        r.lr_factor = lr_factor;
        r.train = evaluate_samples(model, params, train_set, config.jobs);
        r.validation = evaluate_samples(model, params, validation_set, config.jobs);
        result.history.push_back(r);
        if (on_epoch) {
            on_epoch(r);
        }
    };
    record(0, 0.0);

    const auto batch = std::min(config.batch_size, train_set.size());
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto n = model.n_out();
    const auto cols = model.head_cols();

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double factor = lr_schedule(epoch, config.epochs, config.lr_start, config.lr_end);
        std::mt19937_64 shuffle_rng(mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t lo = 0; lo < order.size(); lo += batch) {
            const auto hi = std::min(order.size(), lo + batch);
            const std::span<const std::size_t> idx(order.data() + lo, hi - lo);
            auto grad = params;
            grad.zero();
            const auto dropout_seed =
                mix_seed(config.seed, (static_cast<std::uint64_t>(epoch) << 32) + static_cast<std::uint64_t>(lo));
            accumulate_batch(model, params, train_set, idx, config.chunks, config.jobs, dropout_seed,
                             config.dropout, config.quantum_gradient, grad);
            grad *= 1.0 / static_cast<double>(idx.size());

            const double lr_c = config.classical_lr * factor;
            const double lr_q = config.quantum_lr * factor;
            adam_net.step(params.net, grad.net, lr_c);
            adam_head_b.step(params.head_b, grad.head_b, lr_c);
            if (params.classical_only) {
                adam_head_w.step(params.head_w, grad.head_w, lr_c);
                for (std::size_t o = 0; o < n; ++o) {
                    std::fill_n(params.head_w.begin() + static_cast<std::ptrdiff_t>(o * cols + n), n, 0.0);
                }
            } else {
                adam_head_w.step(params.head_w, grad.head_w, lr_c);
                adam_quantum.step(params.quantum, grad.quantum, lr_q);
            }
        }
        record(epoch + 1, factor);
    }
    return result;
}

const char *gradient_name(QuantumGradient method) noexcept {
    return method == QuantumGradient::Adjoint ? "adjoint" : "shift";
}

QuantumGradient parse_gradient(const std::string &name) {
    if (name == "shift") {
        return QuantumGradient::ParameterShift;
    }
    if (name == "adjoint") {
        return QuantumGradient::Adjoint;
    }
    throw ArgumentError("unknown quantum gradient method: " + name + " (expected shift or adjoint)");
}

nlohmann::json history_to_json(std::span<const EpochRecord> history) {
    auto rows = nlohmann::json::array();
    for (const auto &r : history) {
        rows.push_back({{"epoch", r.epoch},
                        {"lr_factor", r.lr_factor},
                        {"train_loss", r.train.loss},
                        {"train_accuracy", r.train.accuracy},
                        {"val_loss", r.validation.loss},
                        {"val_accuracy", r.validation.accuracy},
                        {"n_train", r.train.n},
                        {"n_val", r.validation.n}});
    }
    return rows;
}

} // namespace evac
