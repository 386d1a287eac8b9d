#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evac/hybrid.hpp"

namespace evac {

/// Named flat tensors with shapes, in storage order.
struct NamedTensor {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> data;
};

[[nodiscard]] std::vector<NamedTensor> named_tensors(const HybridModel &model, const HybridParams &params);

/// {"format": "evac-checkpoint", "version": 1, "classical_only", "meta",
///  "tensors": [{"name", "shape", "data"}...]}
[[nodiscard]] nlohmann::json checkpoint_to_json(const HybridModel &model, const HybridParams &params,
                                                const nlohmann::json &meta = nlohmann::json::object());
[[nodiscard]] HybridParams checkpoint_from_json(const HybridModel &model, const nlohmann::json &doc);

void save_checkpoint(const std::filesystem::path &path, const HybridModel &model, const HybridParams &params,
                     const nlohmann::json &meta = nlohmann::json::object());
[[nodiscard]] HybridParams load_checkpoint(const std::filesystem::path &path, const HybridModel &model,
                                           nlohmann::json *meta = nullptr);

} // namespace evac
