#include "evac/evaluate.hpp"

#include "evac/dataset.hpp"
#include "evac/error.hpp"
#include "evac/features.hpp"
#include "evac/parallel.hpp"

namespace evac {

Path rollout(const HybridModel &model, const HybridParams &params, Environment env,
             std::span<const double> betweenness) {
    model.validate(params);
    return run_policy(std::move(env), [&](const Environment &e, NodeId current) {
        const auto input = build_input(e, current, betweenness);
        if (input.n_neighbors == 0) {
            throw NoPathError("node " + std::to_string(current) + " has no neighbors");
        }
        const auto logits = model.logits(params, input.features);
        const auto mask = input.mask();
        const auto choice = masked_argmax(logits, mask);
        return input.neighbors[static_cast<std::size_t>(choice)];
    });
}

Path rollout(const HybridModel &model, const HybridParams &params, Environment env) {
    const auto betweenness = edge_betweenness(env.graph(), nominal_weights(env.graph()));
    return rollout(model, params, std::move(env), betweenness);
}

EvalReport evaluate(const HybridModel &model, const HybridParams &params, const CityGraph &graph,
                    const EvalConfig &config) {
    if (config.n_scenarios < 1) {
        throw ArgumentError("need at least one evaluation scenario");
    }
    model.validate(params);
    const auto exits = config.exits.empty() ? default_exits(graph) : config.exits;
    const auto betweenness = edge_betweenness(graph, nominal_weights(graph));
    std::vector<PathRecord> records(static_cast<std::size_t>(config.n_scenarios));
    parallel_for(records.size(), config.jobs, [&](std::size_t i) {
        const int id = static_cast<int>(i);
        const auto scenario =
            sample_scenario(graph, exits, config.seed, id, config.sigma_frac, config.max_steps);
        const Environment env(graph, scenario);
        const auto oracle = nodewise_dijkstra(env);
        const auto model_path = rollout(model, params, env, betweenness);
        PathRecord r;
        r.scenario_id = id;
        r.start = scenario.start;
        r.exit = scenario.chosen_exit;
        r.oracle_reached = oracle.reached;
        r.model_reached = model_path.reached;
        r.oracle_cost = oracle.total_cost();
        r.model_cost = model_path.total_cost();
        r.oracle_steps = oracle.steps();
        r.model_steps = model_path.steps();
        records[i] = r;
    });
    return summarize(std::move(records));
}

} // namespace evac
