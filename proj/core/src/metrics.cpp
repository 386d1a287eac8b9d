#include "evac/metrics.hpp"

#include <cmath>
#include <sstream>

#include "evac/error.hpp"

namespace evac {

double arrival_rate(std::span<const PathRecord> records) {
    if (records.empty()) {
        throw ArgumentError("arrival_rate needs at least one record");
    }
    std::size_t hits = 0;
    for (const auto &r : records) {
        hits += r.model_reached ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

double arrival_rate(std::span<const bool> reached) {
    if (reached.empty()) {
        throw ArgumentError("arrival_rate needs at least one record");
    }
    std::size_t hits = 0;
    for (bool r : reached) {
        hits += r ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(reached.size());
}

double path_accuracy(double oracle_cost, double model_cost) {
    if (!(model_cost > 0.0)) {
        throw ArgumentError("model path cost must be positive");
    }
    return 1.0 - std::abs(1.0 - oracle_cost / model_cost);
}

double better_or_equal_rate(std::span<const CostPair> pairs) {
    if (pairs.empty()) {
        throw ArgumentError("better_or_equal_rate needs at least one pair");
    }
    std::size_t hits = 0;
    for (const auto &p : pairs) {
        hits += p.model_cost <= p.oracle_cost ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

EvalReport summarize(std::vector<PathRecord> records) {
    EvalReport report;
    report.n_scenarios = records.size();
    report.arrival_rate = arrival_rate(records);
    std::vector<CostPair> pairs;
    double acc_sum = 0.0;
    for (auto &r : records) {
        if (r.oracle_reached && r.model_reached && r.model_cost > 0.0) {
            r.accuracy = path_accuracy(r.oracle_cost, r.model_cost);
            acc_sum += *r.accuracy;
            pairs.push_back({r.oracle_cost, r.model_cost});
        } else {
            r.accuracy.reset();
        }
    }
    report.n_compared = pairs.size();
    if (!pairs.empty()) {
        report.mean_accuracy = acc_sum / static_cast<double>(pairs.size());
        report.better_or_equal_rate = better_or_equal_rate(pairs);
    }
    report.records = std::move(records);
    return report;
}

nlohmann::json report_to_json(const EvalReport &report) {
    nlohmann::json paths = nlohmann::json::array();
    for (const auto &r : report.records) {
        paths.push_back({{"scenario_id", r.scenario_id},
                         {"start", r.start},
                         {"exit", r.exit},
                         {"oracle_reached", r.oracle_reached},
                         {"model_reached", r.model_reached},
                         {"oracle_cost", r.oracle_cost},
                         {"model_cost", r.model_cost},
                         {"oracle_steps", r.oracle_steps},
                         {"model_steps", r.model_steps},
                         {"accuracy", r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json()}});
    }
    return {{"arrival_rate", report.arrival_rate},
            {"mean_accuracy", report.mean_accuracy},
            {"better_or_equal_rate", report.better_or_equal_rate},
            {"n_scenarios", report.n_scenarios},
            {"n_compared", report.n_compared},
            {"paths", std::move(paths)}};
}

std::string records_to_csv(std::span<const PathRecord> records) {
    std::ostringstream out;
    out.precision(17);
    out << "scenario_id,start,exit,oracle_reached,model_reached,oracle_cost,model_cost,"
           "oracle_steps,model_steps,accuracy\n";
    for (const auto &r : records) {
        out << r.scenario_id << ',' << r.start << ',' << r.exit << ',' << int(r.oracle_reached) << ','
            << int(r.model_reached) << ',' << r.oracle_cost << ',' << r.model_cost << ','
            << r.oracle_steps << ',' << r.model_steps << ',';
        if (r.accuracy) {
            out << *r.accuracy;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace evac
