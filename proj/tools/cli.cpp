#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "evac/analysis.hpp"
#include "evac/checkpoint.hpp"
#include "evac/dataset.hpp"
#include "evac/dyngraph.hpp"
#include "evac/error.hpp"
#include "evac/evaluate.hpp"
#include "evac/graph_io.hpp"
#include "evac/hybrid.hpp"
#include "evac/parallel.hpp"
#include "evac/qasm.hpp"
#include "evac/train.hpp"

namespace evac::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;

struct Shared {
    std::string config_path;
    unsigned jobs = 0;
    nlohmann::json config = nlohmann::json::object();
};

// Flag value if given, else the config file entry, else the default.
template <typename T> void fill(CLI::Option *opt, T &value, const Shared &s, const std::string &key) {
    if (opt->count() > 0 || !s.config.contains(key)) {
        return;
    }
    try {
        value = s.config.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw UsageError("config key " + key + ": " + e.what());
    }
}

// --seed beats QRL_SEED, which beats the config file.
std::uint64_t resolve_seed(CLI::Option *opt, std::uint64_t flag, const Shared &s) {
    if (opt->count() > 0) {
        return flag;
    }
    if (const char *env = std::getenv("QRL_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(env, &pos);
            if (pos != std::string(env).size()) {
                throw std::invalid_argument("trailing characters");
            }
            return v;
        } catch (const std::exception &) {
            throw UsageError(std::string("QRL_SEED is not an unsigned integer: ") + env);
        }
    }
    if (s.config.contains("seed")) {
        try {
            return s.config.at("seed").get<std::uint64_t>();
        } catch (const nlohmann::json::exception &e) {
            throw UsageError(std::string("config seed: ") + e.what());
        }
    }
    throw UsageError("a seed is required (--seed, QRL_SEED or config \"seed\")");
}

void require_file(const std::string &path, const char *what) {
    if (path.empty()) {
        throw UsageError(std::string("--") + what + " is required");
    }
    if (!fs::exists(path)) {
        throw NotFoundError(std::string(what) + " file not found: " + path);
    }
}

void require_out(const std::string &path) {
    if (path.empty()) {
        throw UsageError("--out is required");
    }
}

unsigned jobs_of(const Shared &s) { return s.jobs == 0 ? default_jobs() : s.jobs; }

std::vector<NodeId> exits_for(const CityGraph &g, const std::vector<NodeId> &given) {
    return given.empty() ? default_exits(g) : given;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Evacuation routing with a hybrid quantum-classical FiLM model", "evac"};
    app.require_subcommand(1);
    Shared shared;
    app.add_option("--config", shared.config_path, "JSON file with option defaults");
    app.add_option("--jobs", shared.jobs, "worker threads (default: all cores)");

    std::function<void()> action;

    // graph synth
    auto *graph = app.add_subcommand("graph", "city graph tools")->require_subcommand(1)->fallthrough();
    auto *synth = graph->add_subcommand("synth", "synthesize a jittered grid city")->fallthrough();
    int rows = 8, cols = 8;
    std::uint64_t seed = 0;
    std::string out_path;
    auto *o_rows = synth->add_option("--rows", rows, "grid rows")->check(CLI::PositiveNumber);
    auto *o_cols = synth->add_option("--cols", cols, "grid columns")->check(CLI::PositiveNumber);
    auto *o_seed_g = synth->add_option("--seed", seed, "random seed");
    synth->add_option("--out", out_path, "output graph JSON");
    synth->callback([&] {
        action = [&] {
            fill(o_rows, rows, shared, "rows");
            fill(o_cols, cols, shared, "cols");
            const auto s = resolve_seed(o_seed_g, seed, shared);
            require_out(out_path);
            const auto g = synth_city(rows, cols, s);
            save_graph(g, out_path);
            out << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges -> " << out_path << "\n";
        };
    });

    // env simulate
    auto *env = app.add_subcommand("env", "dynamic environment tools")->require_subcommand(1)->fallthrough();
    auto *simulate = env->add_subcommand("simulate", "record edge weights over time")->fallthrough();
    std::string graph_path, scenario_path;
    int steps = 50;
    simulate->add_option("--graph", graph_path, "graph JSON");
    simulate->add_option("--scenario", scenario_path, "scenario JSON (default: sampled from --seed)");
    auto *o_steps = simulate->add_option("--steps", steps, "steps to record")->check(CLI::NonNegativeNumber);
    auto *o_seed_e = simulate->add_option("--seed", seed, "scenario seed");
    simulate->add_option("--out", out_path, "output trajectory (.csv for one row per step, else JSON)");
    simulate->callback([&] {
        action = [&] {
            require_file(graph_path, "graph");
            require_out(out_path);
            fill(o_steps, steps, shared, "steps");
            const auto g = load_graph(graph_path);
            ScenarioConfig sc;
            if (!scenario_path.empty()) {
                require_file(scenario_path, "scenario");
                sc = scenario_from_json(load_json(scenario_path));
            } else {
                const auto exits = default_exits(g);
                sc = sample_scenario(g, exits, resolve_seed(o_seed_e, seed, shared), 0);
            }
            Environment e(g, sc);
            auto traj = nlohmann::json::array();
            auto snap = [&] {
                const auto w = e.state().weights();
                traj.push_back({{"t", e.state().t()}, {"weights", std::vector<double>(w.begin(), w.end())}});
            };
            snap();
            int done = 0;
            while (done < steps && e.advance() == StepStatus::Ok) {
                snap();
                ++done;
            }
            if (fs::path(out_path).extension() == ".csv") {
                std::ostringstream csv;
                csv.precision(17);
                csv << "t";
                for (std::size_t e = 0; e < g.edge_count(); ++e) {
                    csv << ",e" << e;
                }
                csv << "\n";
                for (const auto &row : traj) {
                    csv << row["t"].get<int>();
                    for (const auto &w : row["weights"]) {
                        csv << "," << w.get<double>();
                    }
                    csv << "\n";
                }
                write_text(out_path, csv.str());
            } else {
                write_text(out_path,
                           nlohmann::json{{"scenario", scenario_to_json(sc)}, {"trajectory", traj}}.dump() + "\n");
            }
            out << "env: " << done << " steps recorded -> " << out_path << "\n";
        };
    });

    // dataset generate
    auto *dataset = app.add_subcommand("dataset", "training data tools")->require_subcommand(1)->fallthrough();
    auto *generate = dataset->add_subcommand("generate", "label scenarios with node-wise Dijkstra")->fallthrough();
    int scenarios = 200;
    double sigma = 0.1;
    int max_steps = 0;
    std::vector<NodeId> exits;
    generate->add_option("--graph", graph_path, "graph JSON");
    auto *o_scen_d = generate->add_option("--n,--scenarios", scenarios, "scenario count")->check(CLI::PositiveNumber);
    auto *o_seed_d = generate->add_option("--seed", seed, "random seed");
    auto *o_sigma = generate->add_option("--sigma", sigma, "travel-time noise as a fraction of nominal");
    auto *o_max = generate->add_option("--max-steps", max_steps, "step budget (0: twice the node count)");
    generate->add_option("--exits", exits, "exit node ids (default: three boundary nodes)");
    generate->add_option("--out", out_path, "output JSONL");
    generate->callback([&] {
        action = [&] {
            require_file(graph_path, "graph");
            require_out(out_path);
            fill(o_scen_d, scenarios, shared, "scenarios");
            fill(o_sigma, sigma, shared, "sigma");
            fill(o_max, max_steps, shared, "max_steps");
            const auto s = resolve_seed(o_seed_d, seed, shared);
            const auto g = load_graph(graph_path);
            DatasetOptions opt;
            opt.exits = exits;
            opt.sigma_frac = sigma;
            opt.max_steps = max_steps;
            opt.jobs = jobs_of(shared);
            const auto data = generate_dataset(g, scenarios, s, opt);
            save_dataset(data, out_path);
            out << "dataset: " << data.samples.size() << " samples from " << scenarios << " scenarios ("
                << data.skipped.size() << " skipped) -> " << out_path << "\n";
        };
    });

    // train
    auto *train_cmd = app.add_subcommand("train", "train the hybrid model")->fallthrough();
    std::string data_path, history_path, gradient = "shift";
    bool classical_only = false;
    int epochs = 100;
    std::size_t batch_size = 2000;
    double val_fraction = 0.1;
    train_cmd->add_option("--data", data_path, "dataset JSONL");
    train_cmd->add_option("--out", out_path, "output checkpoint JSON");
    auto *o_seed_t = train_cmd->add_option("--seed", seed, "random seed");
    auto *o_epochs = train_cmd->add_option("--epochs", epochs, "epochs")->check(CLI::PositiveNumber);
    auto *o_batch = train_cmd->add_option("--batch-size", batch_size, "minibatch size")->check(CLI::PositiveNumber);
    auto *o_val = train_cmd->add_option("--val-fraction", val_fraction, "held-out scenario fraction")
                      ->check(CLI::Range(0.0, 0.9));
    auto *o_grad = train_cmd->add_option("--quantum-gradient", gradient, "shift or adjoint")
                       ->check(CLI::IsMember({"shift", "adjoint"}));
    auto *o_classical = train_cmd->add_flag("--classical-only", classical_only, "train without the quantum branch");
    train_cmd->add_option("--history", history_path, "write per-epoch history JSON here");
    train_cmd->callback([&] {
        action = [&] {
            require_file(data_path, "data");
            require_out(out_path);
            nlohmann::json tc_json = nlohmann::json::object();
            const auto known = train_config_to_json(TrainConfig{});
            for (const auto &[k, v] : shared.config.items()) {
                if (known.contains(k) && k != "seed") {
                    tc_json[k] = v;
                }
            }
            auto tc = train_config_from_json(tc_json);
            tc.seed = resolve_seed(o_seed_t, seed, shared);
            if (o_epochs->count() > 0) {
                tc.epochs = epochs;
            }
            if (o_batch->count() > 0) {
                tc.batch_size = batch_size;
            }
            if (o_grad->count() > 0) {
                tc.quantum_gradient = parse_gradient(gradient);
            }
            if (o_classical->count() > 0) {
                tc.classical_only = classical_only;
            }
            fill(o_val, val_fraction, shared, "val_fraction");
            tc.jobs = jobs_of(shared);
            const auto data = load_dataset(data_path);
            const auto split = split_by_scenario(data.samples, val_fraction, tc.seed);
            const HybridModel model;
            const auto result = train(model, split.train, split.validation, tc);
            const auto &last = result.history.back();
            const double alpha = result.params.classical_only ? 0.0 : primacy_alpha(result.params.head_w);
            nlohmann::json meta{{"train_config", train_config_to_json(tc)},
                                {"val_fraction", val_fraction},
                                {"n_train", split.train.size()},
                                {"n_validation", split.validation.size()},
                                {"alpha_q", alpha},
                                {"history", history_to_json(result.history)}};
            save_checkpoint(out_path, model, result.params, meta);
            if (!history_path.empty()) {
                write_text(history_path, history_to_json(result.history).dump(2) + "\n");
            }
            out << "train: " << (tc.classical_only ? "classical-only" : "hybrid") << ", " << tc.epochs
                << " epochs, val accuracy " << last.validation.accuracy << ", val loss " << last.validation.loss
                << ", alpha_q " << alpha << " -> " << out_path << "\n";
        };
    });

    // eval
    auto *eval_cmd = app.add_subcommand("eval", "roll out a checkpoint against node-wise Dijkstra")->fallthrough();
    std::string ckpt_path, csv_path;
    eval_cmd->add_option("--ckpt", ckpt_path, "checkpoint JSON");
    eval_cmd->add_option("--graph", graph_path, "graph JSON");
    auto *o_scen_e = eval_cmd->add_option("--scenarios", scenarios, "scenario count")->check(CLI::PositiveNumber);
    auto *o_seed_v = eval_cmd->add_option("--seed", seed, "scenario seed");
    eval_cmd->add_option("--exits", exits, "exit node ids (default: three boundary nodes)");
    eval_cmd->add_option("--out", out_path, "output report JSON");
    eval_cmd->add_option("--csv", csv_path, "also write per-path records as CSV");
    eval_cmd->callback([&] {
        action = [&] {
            if (o_scen_e->count() == 0) {
                scenarios = 100;
            }
            fill(o_scen_e, scenarios, shared, "scenarios");
            require_file(ckpt_path, "ckpt");
            require_file(graph_path, "graph");
            require_out(out_path);
            const HybridModel model;
            nlohmann::json meta;
            const auto params = load_checkpoint(ckpt_path, model, &meta);
            const auto g = load_graph(graph_path);
            EvalConfig ec;
            ec.n_scenarios = scenarios;
            ec.seed = resolve_seed(o_seed_v, seed, shared);
            ec.exits = exits_for(g, exits);
            ec.jobs = jobs_of(shared);
            const auto report = evaluate(model, params, g, ec);
            auto doc = report_to_json(report);
            doc["alpha_q"] = params.classical_only ? 0.0 : primacy_alpha(params.head_w);
            doc["classical_only"] = params.classical_only;
            write_text(out_path, doc.dump(2) + "\n");
            if (!csv_path.empty()) {
                write_text(csv_path, records_to_csv(report.records));
            }
            out << "eval: arrival " << report.arrival_rate << ", accuracy " << report.mean_accuracy
                << ", better-or-equal " << report.better_or_equal_rate << " over " << report.n_scenarios
                << " scenarios -> " << out_path << "\n";
        };
    });

    // analyze
    auto *analyze = app.add_subcommand("analyze", "mini-circuit diagnostics")->require_subcommand(1)->fallthrough();
    int N = 1, K = 1;
    std::size_t samples = 1000, n_x = 20, n_theta = 20, observable = 1;
    bool oversample = false;
    std::string scope = "film";
    auto *fourier = analyze->add_subcommand("fourier", "Fourier coefficients of the FiLM readout")->fallthrough();
    auto *o_nf = fourier->add_option("--N", N, "entangler sublayers")->check(CLI::Range(1, 8));
    auto *o_kf = fourier->add_option("--K", K, "re-uploading layers")->check(CLI::Range(1, 16));
    auto *o_samples = fourier->add_option("--samples", samples, "parameter draws")->check(CLI::PositiveNumber);
    auto *o_seed_f = fourier->add_option("--seed", seed, "random seed");
    fourier->add_option("--observable", observable, "FiLM qubit read out (0 or 1)")->check(CLI::Range(0, 1));
    fourier->add_flag("--oversample", oversample, "use a 4K+1 grid and report degrees up to 2K");
    fourier->add_option("--out", out_path, "output violin CSV");
    fourier->callback([&] {
        action = [&] {
            fill(o_nf, N, shared, "N");
            fill(o_kf, K, shared, "K");
            fill(o_samples, samples, shared, "samples");
            require_out(out_path);
            analysis::MiniCircuitConfig mc{N, K, observable};
            analysis::FourierOptions fo;
            fo.jobs = jobs_of(shared);
            if (oversample) {
                fo.degree = 2 * K;
                fo.grid = static_cast<std::size_t>(4 * K + 1);
            }
            const auto s = analysis::sample_fourier(mc, samples, resolve_seed(o_seed_f, seed, shared), fo);
            write_text(out_path, analysis::fourier_violin_csv(s));
            out << "fourier: N=" << N << " K=" << K << ", " << samples << " samples, degree " << s.degree
                << ", grid " << s.grid << " -> " << out_path << "\n";
        };
    });
    auto *fisher = analyze->add_subcommand("fisher", "Fisher information rank and spectrum")->fallthrough();
    auto *o_nfi = fisher->add_option("--N", N, "entangler sublayers")->check(CLI::Range(1, 8));
    auto *o_kfi = fisher->add_option("--K", K, "re-uploading layers")->check(CLI::Range(1, 16));
    auto *o_nx = fisher->add_option("--n-x", n_x, "feature samples per draw")->check(CLI::PositiveNumber);
    auto *o_nt = fisher->add_option("--n-theta", n_theta, "parameter draws")->check(CLI::PositiveNumber);
    auto *o_seed_fi = fisher->add_option("--seed", seed, "random seed");
    fisher->add_option("--scope", scope, "film or full")->check(CLI::IsMember({"film", "full"}));
    fisher->add_option("--out", out_path, "output CSV");
    fisher->callback([&] {
        action = [&] {
            fill(o_nfi, N, shared, "N");
            fill(o_kfi, K, shared, "K");
            fill(o_nx, n_x, shared, "n_x");
            fill(o_nt, n_theta, shared, "n_theta");
            require_out(out_path);
            analysis::MiniCircuitConfig mc{N, K, 1};
            const auto sc = scope == "full" ? analysis::FisherScope::Full : analysis::FisherScope::Film;
            const auto F = analysis::fisher_matrix(mc, n_x, n_theta, resolve_seed(o_seed_fi, seed, shared), sc,
                                                   jobs_of(shared));
            const auto rep = analysis::fisher_spectrum_report(F.F);
            write_text(out_path, analysis::fisher_csv(F, rep));
            out << "fisher: N=" << N << " K=" << K << ", n_p=" << F.F.rows() << ", rank " << rep.rank
                << ", near-zero fraction " << rep.near_zero_fraction;
            if (sc == analysis::FisherScope::Full) {
                out << ", block ratio " << analysis::block_structure(F.F, mc.film_parameter_count());
            }
            out << " -> " << out_path << "\n";
        };
    });

    // export-qasm, also reachable as "qsim export"
    std::size_t sample_index = 0;
    std::string input_path;
    auto add_export = [&](CLI::App *cmd) {
        cmd->fallthrough();
        cmd->add_option("--ckpt,--params", ckpt_path, "checkpoint JSON (default: seeded random angles)");
        cmd->add_option("--data", data_path, "dataset JSONL supplying the bound features");
        cmd->add_option("--input", input_path, "single sample JSON supplying the bound features");
        cmd->add_option("--index", sample_index, "sample index within --data");
        auto *o_seed_q = cmd->add_option("--seed", seed, "seed for random angles without --ckpt");
        cmd->add_option("--out", out_path, "output .qasm file");
        cmd->callback([&, o_seed_q] {
            action = [&, o_seed_q] {
                require_out(out_path);
                const HybridModel model;
                std::vector<double> angles;
                if (!ckpt_path.empty()) {
                    require_file(ckpt_path, "ckpt");
                    const auto p = load_checkpoint(ckpt_path, model);
                    if (p.classical_only) {
                        throw ArgumentError("checkpoint has no quantum branch");
                    }
                    angles = p.quantum;
                } else {
                    angles = model.init(resolve_seed(o_seed_q, seed, shared)).quantum;
                }
                FeatureVector f{};
                if (!input_path.empty()) {
                    require_file(input_path, "input");
                    f = sample_from_json(load_json(input_path)).features;
                } else if (!data_path.empty()) {
                    require_file(data_path, "data");
                    const auto d = load_dataset(data_path);
                    if (sample_index >= d.samples.size()) {
                        throw ArgumentError("--index beyond the dataset");
                    }
                    f = d.samples[sample_index].features;
                }
                const auto main = main_features(f);
                const auto epi = film_features(f);
                const auto &q = model.quantum();
                const auto text = qsim::export_qasm3(q.circuit(), angles, q.circuit_features(main, epi));
                write_text(out_path, text);
                const auto c = q.circuit().census();
                out << "export-qasm: " << c.total() << " gates (" << c.rx << " rx, " << c.rz << " rz, " << c.cx
                    << " cx), " << q.circuit().measured().size() << " measurements -> " << out_path << "\n";
            };
        });
    };
    add_export(app.add_subcommand("export-qasm", "write the quantum branch as OpenQASM 3"));
    auto *qsim_cmd = app.add_subcommand("qsim", "quantum circuit tools")->require_subcommand(1)->fallthrough();
    add_export(qsim_cmd->add_subcommand("export", "same as export-qasm"));

    if (args.empty()) {
        err << app.help();
        return 2;
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << "error: " << e.what() << "\n\n";
        const auto *sub = &app;
        for (const auto *s = sub; !s->get_subcommands().empty();) {
            s = s->get_subcommands().front();
            sub = s;
        }
        err << sub->help();
        return 2;
    }
    try {
        if (!shared.config_path.empty()) {
            if (!fs::exists(shared.config_path)) {
                throw NotFoundError("config file not found: " + shared.config_path);
            }
            shared.config = load_json(shared.config_path);
            if (!shared.config.is_object()) {
                throw UsageError("config file must hold a JSON object");
            }
        }
        if (!action) {
            err << app.help();
            return 2;
        }
        action();
        return 0;
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, const char *const *argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, std::cout, std::cerr);
}

} // namespace evac::cli
