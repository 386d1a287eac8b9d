#include "evac/checkpoint.hpp"

#include <map>

#include "evac/error.hpp"
#include "evac/graph_io.hpp"

namespace evac {

namespace {

constexpr const char *kFormat = "evac-checkpoint";
constexpr int kVersion = 1;

} // namespace

std::vector<NamedTensor> named_tensors(const HybridModel &model, const HybridParams &params) {
    model.validate(params);
    std::vector<NamedTensor> out;
    for (const auto &s : model.net().specs()) {
        out.push_back({s.name, s.shape,
                       {params.net.begin() + static_cast<std::ptrdiff_t>(s.offset),
                        params.net.begin() + static_cast<std::ptrdiff_t>(s.offset + s.size())}});
    }
    if (!params.classical_only) {
        const auto &q = model.config().quantum;
        const auto a = q.film_parameter_count();
        const auto b = a + q.qdil_parameter_count();
        const auto &v = params.quantum;
        out.push_back({"quantum.film", {a}, {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(a)}});
        out.push_back({"quantum.qdil",
                       {b - a},
                       {v.begin() + static_cast<std::ptrdiff_t>(a), v.begin() + static_cast<std::ptrdiff_t>(b)}});
        out.push_back({"quantum.final", {v.size() - b}, {v.begin() + static_cast<std::ptrdiff_t>(b), v.end()}});
    }
    out.push_back({"head.w", {model.n_out(), model.head_cols()}, params.head_w});
    out.push_back({"head.b", {model.n_out()}, params.head_b});
    return out;
}

nlohmann::json checkpoint_to_json(const HybridModel &model, const HybridParams &params, const nlohmann::json &meta) {
    auto tensors = nlohmann::json::array();
    for (const auto &t : named_tensors(model, params)) {
        tensors.push_back({{"name", t.name}, {"shape", t.shape}, {"data", t.data}});
    }
    return {{"format", kFormat},
            {"version", kVersion},
            {"classical_only", params.classical_only},
            {"meta", meta},
            {"tensors", tensors}};
}

HybridParams checkpoint_from_json(const HybridModel &model, const nlohmann::json &doc) {
    try {
        if (doc.at("format").get<std::string>() != kFormat || doc.at("version").get<int>() != kVersion) {
            throw ArgumentError("not a version 1 evac checkpoint");
        }
        auto params = model.zeros(doc.at("classical_only").get<bool>());
        std::map<std::string, NamedTensor> by_name;
        for (const auto &t : doc.at("tensors")) {
            NamedTensor nt{t.at("name").get<std::string>(), t.at("shape").get<std::vector<std::size_t>>(),
                           t.at("data").get<std::vector<double>>()};
            auto name = nt.name;
            if (!by_name.emplace(name, std::move(nt)).second) {
                throw ArgumentError("duplicate tensor " + name);
            }
        }
        // Use the expected layout as a template and fill each slot by name.
        auto expected = named_tensors(model, params);
        std::vector<double> flat;
        for (const auto &e : expected) {
            const auto it = by_name.find(e.name);
            if (it == by_name.end()) {
                throw ArgumentError("checkpoint is missing tensor " + e.name);
            }
            if (it->second.shape != e.shape || it->second.data.size() != e.data.size()) {
                throw ArgumentError("tensor " + e.name + " has the wrong shape");
            }
            flat.insert(flat.end(), it->second.data.begin(), it->second.data.end());
            by_name.erase(it);
        }
        if (!by_name.empty()) {
            throw ArgumentError("checkpoint has unexpected tensor " + by_name.begin()->first);
        }
        // named_tensors order is net specs, quantum, head.w, head.b = flatten order
        params.assign(flat);
        model.validate(params);
        return params;
    } catch (const nlohmann::json::exception &e) {
        throw ArgumentError(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path &path, const HybridModel &model, const HybridParams &params,
                     const nlohmann::json &meta) {
    write_text(path, checkpoint_to_json(model, params, meta).dump() + "\n");
}

HybridParams load_checkpoint(const std::filesystem::path &path, const HybridModel &model, nlohmann::json *meta) {
    const auto doc = load_json(path);
    auto params = checkpoint_from_json(model, doc);
    if (meta != nullptr) {
        *meta = doc.value("meta", nlohmann::json::object());
    }
    return params;
}

} // namespace evac
