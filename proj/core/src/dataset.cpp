#include "evac/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "evac/error.hpp"
#include "evac/graph_io.hpp"
#include "evac/oracle.hpp"
#include "evac/parallel.hpp"

namespace evac {

ScenarioConfig sample_scenario(const CityGraph &graph, std::span<const NodeId> exits, std::uint64_t seed,
                               int id, double sigma_frac, int max_steps) {
    if (exits.empty()) {
        throw ArgumentError("no exits");
    }
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(id)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ScenarioConfig s;
    s.epicenter = {unit(rng), unit(rng)};
    std::vector<NodeId> candidates;
    for (const auto &n : graph.nodes()) {
        if (std::find(exits.begin(), exits.end(), n.id) == exits.end()) {
            candidates.push_back(n.id);
        }
    }
    if (candidates.empty()) {
        throw ArgumentError("every node is an exit");
    }
    s.start = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    s.exits.assign(exits.begin(), exits.end());
    s.chosen_exit = exits[std::uniform_int_distribution<std::size_t>(0, exits.size() - 1)(rng)];
    s.rng_seed = rng();
    s.max_steps = max_steps;
    s.sigma_frac = sigma_frac;
    return s;
}

Dataset generate_dataset(const CityGraph &graph, int n_scenarios, std::uint64_t seed,
                         const DatasetOptions &options) {
    if (n_scenarios < 1) {
        throw ArgumentError("n_scenarios must be at least 1");
    }
    const auto exits = options.exits.empty() ? default_exits(graph) : options.exits;
    const auto betweenness = edge_betweenness(graph, nominal_weights(graph));

    struct Outcome {
        std::vector<Sample> samples;
        std::string skipped;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(n_scenarios));
    parallel_for(outcomes.size(), options.jobs, [&](std::size_t i) {
        const int id = static_cast<int>(i);
        auto scenario = sample_scenario(graph, exits, seed, id, options.sigma_frac, options.max_steps);
        std::vector<Sample> samples;
        const auto path = run_policy(Environment(graph, scenario), [&](const Environment &env, NodeId current) {
            const auto input = build_input(env, current, betweenness);
            const NodeId next = dijkstra_next(env, current);
            const auto it = std::find(input.neighbors.begin(), input.neighbors.begin() + input.n_neighbors, next);
            Sample s;
            s.features = input.features;
            s.label = static_cast<int>(it - input.neighbors.begin());
            s.n_neighbors = static_cast<int>(input.n_neighbors);
            s.scenario_id = id;
            s.t = env.state().t();
            samples.push_back(s);
            return next;
        });
        if (path.reached) {
            outcomes[i].samples = std::move(samples);
        } else {
            outcomes[i].skipped = "scenario " + std::to_string(id) + ": oracle exhausted the step budget";
        }
    });

    Dataset data;
    for (auto &o : outcomes) {
        data.samples.insert(data.samples.end(), o.samples.begin(), o.samples.end());
        if (!o.skipped.empty()) {
            data.skipped.push_back(std::move(o.skipped));
        }
    }
    return data;
}

nlohmann::json sample_to_json(const Sample &s) {
    return {{"scenario_id", s.scenario_id},
            {"t", s.t},
            {"label", s.label},
            {"n_neighbors", s.n_neighbors},
            {"features", s.features}};
}

Sample sample_from_json(const nlohmann::json &doc) {
    try {
        Sample s;
        s.scenario_id = doc.at("scenario_id").get<int>();
        s.t = doc.value("t", 0);
        s.label = doc.at("label").get<int>();
        s.n_neighbors = doc.at("n_neighbors").get<int>();
        const auto values = doc.at("features").get<std::vector<double>>();
        if (values.size() != kFeatureCount) {
            throw InvariantError("sample must carry exactly 36 features");
        }
        std::copy(values.begin(), values.end(), s.features.begin());
        if (s.n_neighbors < 1 || s.n_neighbors > static_cast<int>(kMaxNeighbors) || s.label < 0 ||
            s.label >= s.n_neighbors) {
            throw InvariantError("sample label must point at a present neighbor");
        }
        return s;
    } catch (const nlohmann::json::exception &ex) {
        throw IoError(std::string("malformed sample: ") + ex.what());
    }
}

std::string to_jsonl(const Dataset &data) {
    std::string out;
    for (const auto &s : data.samples) {
        out += sample_to_json(s).dump();
        out += '\n';
    }
    return out;
}

Dataset from_jsonl(const std::string &text) {
    Dataset data;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            data.samples.push_back(sample_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::parse_error &ex) {
            throw IoError("line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return data;
}

void save_dataset(const Dataset &data, const std::filesystem::path &path) { write_text(path, to_jsonl(data)); }

Dataset load_dataset(const std::filesystem::path &path) { return from_jsonl(read_text(path)); }

DatasetSplit split_by_scenario(const std::vector<Sample> &samples, double val_fraction, std::uint64_t seed) {
    if (val_fraction < 0.0 || val_fraction >= 1.0) {
        throw ArgumentError("val_fraction must lie in [0, 1)");
    }
    std::set<int> id_set;
    for (const auto &s : samples) {
        id_set.insert(s.scenario_id);
    }
    std::vector<int> ids(id_set.begin(), id_set.end());
    std::mt19937_64 rng(seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(ids.size())));
    const std::set<int> val_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
    DatasetSplit split;
    for (const auto &s : samples) {
        (val_ids.count(s.scenario_id) ? split.validation : split.train).push_back(s);
    }
    return split;
}

} // namespace evac
