// zombi: command-line driver for ZoMBI runs, ensembles and benchmarks.
//
//   zombi run --objective ackley5 --acq lcb-adaptive --seed 42 --out ./t
//   zombi ensemble --objective ackley5 --runs 12 --out ./e
//   zombi timing --budget 500 --out ./timing
//   zombi gen-needle --out needle.csv
//   zombi smooth-sweep --data needle.csv --target target --out ./sweep
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zombi/bench.hpp"
#include "zombi/engine.hpp"
#include "zombi/objectives.hpp"
#include "zombi/trace_io.hpp"

namespace fs = std::filesystem;
using namespace zombi;

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct ObjectiveFlags {
    std::string objective = "ackley5";
    std::size_t dim = 5;
    double scale = 3.0;
    double lower = -5.0;
    double upper = 5.0;

    std::string data;
    std::string target;
    std::string sense = "min";
    std::string interp = "knn";
    std::size_t k = 8;
    std::size_t trees = 100;
    std::size_t depth = 12;
    std::optional<double> bandwidth;

    std::size_t needle_dim = 5;
    std::size_t needle_rows = 10000;
    double needle_fraction = 0.008;
    double needle_depth = -2.0;
    std::uint64_t needle_seed = 1;

    void add_to(CLI::App& app) {
        app.add_option("--objective", objective, "ackley5 | ackley | dataset | needle")
            ->check(CLI::IsMember({"ackley5", "ackley", "dataset", "needle"}));
        app.add_option("--dim", dim, "Ackley dimensionality (objective ackley)");
        app.add_option("--scale", scale, "Ackley basin narrowing factor");
        app.add_option("--lower", lower, "Ackley lower bound per dimension");
        app.add_option("--upper", upper, "Ackley upper bound per dimension");
        app.add_option("--data", data, "CSV dataset path (objective dataset)");
        app.add_option("--target", target, "target column name (objective dataset)");
        app.add_option("--sense", sense, "min | max")->check(CLI::IsMember({"min", "max"}));
        app.add_option("--interp", interp, "knn | trees")->check(CLI::IsMember({"knn", "trees"}));
        app.add_option("--k", k, "neighbours for knn interpolation");
        app.add_option("--trees", trees, "trees for bagged-tree interpolation");
        app.add_option("--depth", depth, "max tree depth for bagged-tree interpolation");
        app.add_option("--bandwidth", bandwidth, "Gaussian smoothing bandwidth (normalized units)");
        app.add_option("--needle-dim", needle_dim, "planted needle: dimensionality");
        app.add_option("--needle-rows", needle_rows, "planted needle: dataset rows");
        app.add_option("--needle-fraction", needle_fraction, "planted needle: needle row fraction");
        app.add_option("--needle-depth", needle_depth, "planted needle: needle target depth");
        app.add_option("--needle-seed", needle_seed, "planted needle: generator seed");
    }

    bool dataset_backed() const { return objective == "dataset" || objective == "needle"; }

    InterpolatedManifold manifold() const {
        TabularDataset ds;
        if (objective == "needle") {
            ds = plant_needle(needle_dim, needle_rows, needle_fraction, needle_depth, needle_seed).dataset;
        } else {
            if (data.empty()) throw UsageError("objective 'dataset' requires --data");
            if (target.empty()) throw UsageError("objective 'dataset' requires --target");
            ds = load_csv(data, target, sense == "max" ? ObjectiveSense::maximize : ObjectiveSense::minimize);
            if (ds.dropped_rows) std::cerr << "warning: dropped " << ds.dropped_rows << " unparseable rows\n";
        }
        if (interp == "trees") {
            ForestParams fp;
            fp.trees = trees;
            fp.max_depth = depth;
            return InterpolatedManifold::bagged_trees(std::move(ds), fp, needle_seed);
        }
        return InterpolatedManifold::knn_idw(std::move(ds), k);
    }

    /// Objective plus the bounds and sense it should be searched with.
    struct Resolved {
        Objective fn;
        Bounds bounds;
        ObjectiveSense sense;
    };

    Resolved resolve() const {
        if (dataset_backed()) {
            const auto m = manifold();
            Resolved r{Objective(m), m.dataset().ranges, m.dataset().sense};
            if (bandwidth) r.fn = gaussian_smooth(m, *bandwidth);
            return r;
        }
        const std::size_t d = objective == "ackley5" ? 5 : dim;
        if (d == 0 || !(lower < upper)) throw UsageError("ackley needs dim >= 1 and lower < upper");
        AckleyParams p;
        p.scale = scale;
        return {[p](const Point& x) { return ackley(x, p); }, Bounds::cube(d, lower, upper), ObjectiveSense::minimize};
    }
};

struct EngineFlags {
    std::string mode = "zombi";
    std::string acq = "lcb-adaptive";
    std::size_t activations = 4;
    std::size_t phi = 20;
    std::size_t init = 5;
    std::size_t memory = 5;
    std::size_t global_samples = 10;
    std::size_t candidates = 1000;
    std::size_t budget = 0;
    std::optional<double> beta, xi, epsilon, eta;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::size_t threads = 1;

    void add_to(CLI::App& app, bool with_mode) {
        if (with_mode) app.add_option("--mode", mode, "zombi | plain-bo")->check(CLI::IsMember({"zombi", "plain-bo"}));
        app.add_option("--acq", acq, "ei | lcb | ei-abrupt | lcb-adaptive")
            ->check(CLI::IsMember({"ei", "lcb", "ei-abrupt", "lcb-adaptive"}));
        app.add_option("--activations", activations, "number of activations (alpha)");
        app.add_option("--phi", phi, "forward experiments per activation");
        app.add_option("--init", init, "LHS points per activation (i)");
        app.add_option("--memory", memory, "memory points used for zooming (m)");
        app.add_option("--global-samples", global_samples, "initial global LHS samples");
        app.add_option("--candidates", candidates, "acquisition candidates per step");
        app.add_option("--budget", budget, "cap on total evaluations (0: natural budget)");
        app.add_option("--beta", beta, "acquisition beta");
        app.add_option("--xi", xi, "acquisition xi");
        app.add_option("--epsilon", epsilon, "LCB Adaptive decay epsilon");
        app.add_option("--eta", eta, "EI Abrupt plateau threshold eta");
        app.add_option("--seed", seed, "random seed");
        app.add_option("--out", out, "output directory");
        app.add_option("--threads", threads, "worker threads for ensembles");
    }

    ZombiConfig config(const ObjectiveFlags::Resolved& obj) const {
        ZombiConfig c;
        c.activations = activations;
        c.forward_per_activation = phi;
        c.init_per_activation = init;
        c.memory = memory;
        c.initial_global_samples = global_samples;
        c.candidates_per_step = candidates;
        c.max_evaluations = budget;
        c.acquisition = *parse_acq_kind(acq);
        c.hyper = AcqHyperparams::defaults_for(c.acquisition);
        if (beta) c.hyper.beta = *beta;
        if (xi) c.hyper.xi = *xi;
        if (epsilon) c.hyper.epsilon = *epsilon;
        if (eta) c.hyper.eta = *eta;
        c.seed = seed;
        c.bounds = obj.bounds;
        c.sense = obj.sense;
        try {
            c.validate();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return c;
    }

    RunMode run_mode() const { return mode == "plain-bo" ? RunMode::plain_bo : RunMode::zombi; }
};

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    return f;
}

void print_best(const RunTrace& t) {
    std::cout << "best y = " << detail::fmt_real(t.best_value()) << " at x = " << to_string(t.best.x) << " (iteration "
              << t.best.iteration << ", " << t.evaluations() << " evaluations)\n";
}

int cmd_run(const ObjectiveFlags& of, const EngineFlags& ef) {
    const auto obj = of.resolve();
    const auto config = ef.config(obj);
    const RunTrace trace = run(ef.run_mode(), obj.fn, config);
    const fs::path dir = ef.out;
    auto csv = open_out(dir / "trace.csv");
    write_trace_csv(csv, trace);
    auto js = open_out(dir / "summary.json");
    js << summary_json(trace, config).dump(2) << '\n';
    print_best(trace);
    return 0;
}

int cmd_ensemble(const ObjectiveFlags& of, const EngineFlags& ef, std::size_t runs) {
    if (runs == 0) throw UsageError("--runs must be positive");
    const auto obj = of.resolve();
    const auto config = ef.config(obj);
    const auto result = run_ensemble(obj.fn, config, runs, ef.run_mode(), ef.threads);
    const fs::path dir = ef.out;

    nlohmann::ordered_json summary;
    summary["runs"] = runs;
    summary["mode"] = std::string(to_string(ef.run_mode()));
    summary["median_final_best_y"] = result.median_final_best();
    summary["config"] = config_json(config);
    summary["members"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < runs; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "trace_%03zu.csv", k);
        auto csv = open_out(dir / name);
        write_trace_csv(csv, result.traces[k]);
        ZombiConfig member = config;
        member.seed = config.seed + k;
        summary["members"].push_back(summary_json(result.traces[k], member));
    }
    auto env = open_out(dir / "envelope.csv");
    write_envelope_csv(env, result);
    auto js = open_out(dir / "summary.json");
    js << summary.dump(2) << '\n';
    std::cout << "median final best y over " << runs
              << " runs = " << detail::fmt_real(result.median_final_best()) << '\n';
    return 0;
}

int cmd_timing(const ObjectiveFlags& of, EngineFlags ef) {
    if (ef.budget == 0) ef.budget = 500;
    if (ef.budget <= ef.global_samples) throw UsageError("--budget must exceed --global-samples");
    const std::size_t per = ef.init + ef.phi;
    ef.activations = std::max<std::size_t>(1, (ef.budget - ef.global_samples + per - 1) / std::max<std::size_t>(per, 1));
    const auto obj = of.resolve();
    const auto config = ef.config(obj);

    const RunTrace z = run_zombi(obj.fn, config);
    const RunTrace p = run_plain_bo(obj.fn, config);
    const TimingReport rep = compute_timing_report(z, p);

    const fs::path dir = ef.out;
    auto csv = open_out(dir / "timing.csv");
    write_timing_csv(csv, z, p);
    auto js = open_out(dir / "timing.json");
    js << timing_json(rep).dump(2) << '\n';
    std::cout << "plain-BO time ratio (last/first decile): " << rep.plain_total_decile_ratio << '\n'
              << "ZoMBI last/first activation mean: " << rep.zombi_activation_total_ratio() << '\n'
              << "ZoMBI sawtooth max (ms): " << rep.zombi_sawtooth_max_ms << '\n'
              << "final-step speedup: " << rep.final_speedup << '\n';
    return 0;
}

int cmd_smooth_sweep(const ObjectiveFlags& of, EngineFlags ef, const std::vector<double>& bandwidths,
                     const std::vector<std::string>& acqs, std::size_t runs) {
    if (!of.dataset_backed()) throw UsageError("smooth-sweep needs a dataset (--data/--target) or --objective needle");
    if (runs == 0 || bandwidths.empty() || acqs.empty()) throw UsageError("empty sweep");
    for (double b : bandwidths)
        if (!(b > 0.0)) throw UsageError("bandwidths must be positive");
    std::vector<AcqKind> kinds;
    for (const auto& a : acqs) kinds.push_back(*parse_acq_kind(a));
    if (ef.budget == 0) ef.budget = 100;

    const auto manifold = of.manifold();
    ObjectiveFlags::Resolved probe{Objective(manifold), manifold.dataset().ranges, manifold.dataset().sense};
    const auto base = ef.config(probe);
    const auto rows = run_smooth_sweep(manifold, bandwidths, kinds, runs, base, ef.threads);

    auto csv = open_out(fs::path(ef.out) / "sweep.csv");
    write_sweep_csv(csv, rows);
    write_sweep_csv(std::cout, rows);
    return 0;
}

int cmd_gen_needle(std::size_t dim, std::size_t rows, double fraction, double depth, std::uint64_t seed,
                   const std::string& out) {
    PlantedNeedle needle = [&] {
        try {
            return plant_needle(dim, rows, fraction, depth, seed);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }();
    auto f = open_out(out);
    write_csv(f, needle.dataset);
    std::cout << "wrote " << needle.dataset.size() << " rows (" << needle.needle_rows << " needle rows) to " << out
              << "\ncenter = " << to_string(needle.center) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ZoMBI: zooming memory-based initialization for needle-in-a-haystack optimization"};
    app.require_subcommand(1);

    ObjectiveFlags of;
    EngineFlags ef;
    std::size_t runs = 12;
    std::vector<double> bandwidths{0.01, 0.05, 0.1, 0.2, 0.4};
    std::vector<std::string> acqs{"ei", "lcb", "ei-abrupt", "lcb-adaptive"};

    auto* run_cmd = app.add_subcommand("run", "single ZoMBI or plain-BO run");
    of.add_to(*run_cmd);
    ef.add_to(*run_cmd, true);

    auto* ens_cmd = app.add_subcommand("ensemble", "independent seeded runs with a median envelope");
    of.add_to(*ens_cmd);
    ef.add_to(*ens_cmd, true);
    ens_cmd->add_option("--runs", runs, "number of runs");

    auto* timing_cmd = app.add_subcommand("timing", "ZoMBI vs plain-BO compute time per step");
    of.add_to(*timing_cmd);
    ef.add_to(*timing_cmd, false);

    auto* sweep_cmd = app.add_subcommand("smooth-sweep", "basin-width sweep over Gaussian smoothing bandwidths");
    of.add_to(*sweep_cmd);
    ef.add_to(*sweep_cmd, false);
    sweep_cmd->add_option("--runs", runs, "runs per cell");
    sweep_cmd->add_option("--bandwidths", bandwidths, "smoothing bandwidths")->delimiter(',');
    sweep_cmd->add_option("--acqs", acqs, "acquisition functions")
        ->delimiter(',')
        ->check(CLI::IsMember({"ei", "lcb", "ei-abrupt", "lcb-adaptive"}));

    auto* gen_cmd = app.add_subcommand("gen-needle", "write a synthetic planted-needle dataset");
    std::size_t g_dim = 5, g_rows = 10000;
    double g_fraction = 0.008, g_depth = -2.0;
    std::uint64_t g_seed = 1;
    std::string g_out = "needle.csv";
    gen_cmd->add_option("--dim", g_dim, "dimensionality");
    gen_cmd->add_option("--rows", g_rows, "rows");
    gen_cmd->add_option("--fraction", g_fraction, "needle row fraction");
    gen_cmd->add_option("--depth", g_depth, "needle depth (negative)");
    gen_cmd->add_option("--seed", g_seed, "seed");
    gen_cmd->add_option("--out", g_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run_cmd) return cmd_run(of, ef);
        if (*ens_cmd) return cmd_ensemble(of, ef, runs);
        if (*timing_cmd) return cmd_timing(of, ef);
        if (*sweep_cmd) return cmd_smooth_sweep(of, ef, bandwidths, acqs, runs);
        if (*gen_cmd) return cmd_gen_needle(g_dim, g_rows, g_fraction, g_depth, g_seed, g_out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
