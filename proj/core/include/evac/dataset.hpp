#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evac/dyngraph.hpp"
#include "evac/features.hpp"

namespace evac {

/// One supervised decision: features at a node and the index of the
/// neighbor node-wise Dijkstra moved to.
struct Sample {
    FeatureVector features{};
    int label = 0;
    int n_neighbors = 0;
    int scenario_id = 0;
    int t = 0;

    [[nodiscard]] NeighborMask mask() const noexcept { return mask_for(static_cast<std::size_t>(n_neighbors)); }
    friend bool operator==(const Sample &, const Sample &) = default;
};

struct Dataset {
    std::vector<Sample> samples;
    std::vector<std::string> skipped; ///< one line per scenario the oracle could not finish
};

struct DatasetOptions {
    std::vector<NodeId> exits; ///< empty selects default_exits(graph)
    double sigma_frac = 0.1;
    int max_steps = 0;
    unsigned jobs = 1;
};

/// Random epicenter, start and chosen exit for scenario `id`, derived from
/// (seed, id) alone.
[[nodiscard]] ScenarioConfig sample_scenario(const CityGraph &graph, std::span<const NodeId> exits,
                                             std::uint64_t seed, int id, double sigma_frac = 0.1,
                                             int max_steps = 0);

/// Rolls node-wise Dijkstra on each scenario and records one sample per
/// decision. Deterministic in (graph, n_scenarios, seed, options) and
/// independent of the job count.
[[nodiscard]] Dataset generate_dataset(const CityGraph &graph, int n_scenarios, std::uint64_t seed,
                                       const DatasetOptions &options = {});

[[nodiscard]] nlohmann::json sample_to_json(const Sample &s);
[[nodiscard]] Sample sample_from_json(const nlohmann::json &doc);

[[nodiscard]] std::string to_jsonl(const Dataset &data);
[[nodiscard]] Dataset from_jsonl(const std::string &text);
void save_dataset(const Dataset &data, const std::filesystem::path &path);
[[nodiscard]] Dataset load_dataset(const std::filesystem::path &path);

struct DatasetSplit {
    std::vector<Sample> train;
    std::vector<Sample> validation;
};

/// Partitions by scenario id so no scenario contributes to both sides.
[[nodiscard]] DatasetSplit split_by_scenario(const std::vector<Sample> &samples, double val_fraction,
                                             std::uint64_t seed);

} // namespace evac
