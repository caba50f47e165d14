#include "usp/cli.hpp"

#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "usp/grape.hpp"
#include "usp/io.hpp"
#include "usp/parallel.hpp"

namespace usp {

namespace {

namespace fs = std::filesystem;

struct CommandOpts {
    std::string config_path;
    std::string checkpoint;
    std::string out_dir;
    std::int64_t seed = -1;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommandOpts& opts, bool needs_checkpoint) {
    cmd->add_option("--config", opts.config_path, "run configuration file")->required();
    auto* ck = cmd->add_option("--checkpoint", opts.checkpoint, "trained network checkpoint");
    if (needs_checkpoint) ck->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--jobs", opts.jobs, "worker threads for evaluation");
}

RunConfig resolve_config(const CommandOpts& opts) {
    RunConfig cfg = load_run_config(opts.config_path);
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    finalize_config(cfg);
    Eigen::setNbThreads(cfg.jobs);
    return cfg;
}

Mlp load_net_for(const RunConfig& cfg, const std::string& path) {
    Mlp net = load_checkpoint(path);
    if (net.input_size() != 2 * cfg.state_dim() || net.output_size() != cfg.action_count()) {
        throw std::runtime_error("checkpoint '" + path + "' does not match the configured system (" +
                                 std::to_string(net.input_size()) + "->" +
                                 std::to_string(net.output_size()) + " vs expected " +
                                 std::to_string(2 * cfg.state_dim()) + "->" +
                                 std::to_string(cfg.action_count()) + ")");
    }
    return net;
}

void export_task_sets(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& outputs) {
    if (cfg.system == SystemKind::single_qubit) {
        write_task_set(dir / "train_points.txt", single_qubit_train_grid(), cfg.seed);
        write_task_set(dir / "test_points.txt", single_qubit_test_grid(), cfg.seed);
    } else {
        const auto points = two_qubit_point_set();
        const auto [train, test] = split_train_test(
            points, static_cast<std::size_t>(cfg.agent.points_for_training),
            derive_seed(cfg.seed, {seed_tags::split}));
        write_task_set(dir / "train_points.txt", train, cfg.seed);
        write_task_set(dir / "test_points.txt", test, cfg.seed);
    }
    outputs.push_back("train_points.txt");
    outputs.push_back("test_points.txt");
}

int cmd_train(const CommandOpts& opts) {
    const RunConfig cfg = resolve_config(opts);
    const fs::path dir = cfg.out_dir;
    const auto tasks = build_train_tasks(cfg);

    UspTrainer trainer(cfg, cfg.seed);
    const TrainingReport report = trainer.train(tasks);

    std::vector<std::string> outputs;
    save_checkpoint(dir / "checkpoint.bin", trainer.main_net(), cfg.seed);
    outputs.push_back("checkpoint.bin");
    write_text(dir / "training_report.json", training_report_json(report).dump(2) + "\n");
    outputs.push_back("training_report.json");
    export_task_sets(cfg, dir, outputs);
    write_manifest(dir / "manifest.json", "train", cfg,
                   file_hash_hex(dir / "checkpoint.bin"), outputs);

    int successes = 0, episodes = 0;
    for (const auto& p : report.points) {
        successes += p.successes;
        episodes += p.episodes;
    }
    std::cout << "trained " << tasks.size() << " points, " << episodes << " episodes ("
              << successes << " successful), " << report.total_env_steps << " env steps in "
              << report.wall_seconds << " s\n";
    std::cout << "checkpoint: " << (dir / "checkpoint.bin").string() << "\n";
    return 0;
}

int cmd_evaluate(const CommandOpts& opts) {
    const RunConfig cfg = resolve_config(opts);
    const fs::path dir = cfg.out_dir;
    const Mlp net = load_net_for(cfg, opts.checkpoint);
    const Environment env = Environment::from_config(cfg);
    const auto tasks = build_test_tasks(cfg, true);

    const auto records = evaluate_set(net, env, tasks, cfg.agent.max_steps_per_episode, cfg.jobs);
    const EvalSummary summary = summarize(records, cfg.histogram_bins, cfg.agent.success_threshold);

    std::vector<nlohmann::json> lines;
    lines.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        lines.push_back(trajectory_record(records[i], tasks[i], cfg.system));
    }
    std::vector<std::string> outputs = {"results.jsonl", "histogram.csv", "summary.txt"};
    write_jsonl(dir / "results.jsonl", lines);
    write_histogram_csv(dir / "histogram.csv", summary.histogram);
    write_summary(dir / "summary.txt", summary);
    write_manifest(dir / "manifest.json", "evaluate", cfg, file_hash_hex(opts.checkpoint), outputs);

    std::cout << "evaluated " << summary.tasks << " tasks: average max fidelity "
              << summary.average_max_fidelity << ", average design time "
              << summary.average_design_seconds << " s, success rate " << summary.success_rate
              << "\n";
    return 0;
}

struct DesignOpts {
    CommandOpts common;
    double theta = -1.0, phi = -1.0;
    std::vector<double> thetas;
    std::vector<int> phases;
    bool want_bloch_trail = false;
};

int cmd_design(const DesignOpts& opts) {
    const RunConfig cfg = resolve_config(opts.common);
    const fs::path dir = cfg.out_dir;
    const Mlp net = load_net_for(cfg, opts.common.checkpoint);
    const Environment env = Environment::from_config(cfg);

    PreparationTask task;
    task.system = cfg.system;
    task.target = cfg.target_state;
    task.point.system = cfg.system;
    task.point.index = 0;
    if (cfg.system == SystemKind::single_qubit) {
        if (opts.theta < 0.0) throw std::runtime_error("single-qubit design needs --theta and --phi");
        task.point.bloch = BlochPoint{opts.theta, opts.phi};
        task.initial = point_to_state(task.point.bloch);
    } else {
        if (opts.want_bloch_trail) {
            throw std::runtime_error("Bloch trails are unsupported for two-qubit states");
        }
        if (opts.thetas.size() != 3 || opts.phases.size() != 4) {
            throw std::runtime_error("two-qubit design needs --thetas t1,t2,t3 and --phases b1,b2,b3,b4");
        }
        HyperspherePoint p;
        std::copy(opts.thetas.begin(), opts.thetas.end(), p.thetas.begin());
        std::copy(opts.phases.begin(), opts.phases.end(), p.phase_indices.begin());
        task.point.hyper = p;
        task.initial = point_to_state(p);
    }

    EvalRecord record;
    record.task_index = 0;
    record.trajectory = design_trajectory(net, env, task, cfg.agent.max_steps_per_episode,
                                          &record.design_seconds);

    std::vector<std::string> outputs = {"trajectory.json"};
    write_text(dir / "trajectory.json",
               trajectory_record(record, task, cfg.system).dump(2) + "\n");
    if (cfg.system == SystemKind::single_qubit) {
        write_bloch_trail_csv(dir / "bloch_trail.csv",
                              bloch_trail(env, task, record.trajectory.actions));
        outputs.push_back("bloch_trail.csv");
    }
    write_manifest(dir / "manifest.json", "design", cfg, file_hash_hex(opts.common.checkpoint),
                   outputs);

    std::cout << "designed trajectory: " << record.trajectory.steps() << " steps, max fidelity "
              << record.trajectory.max_fidelity << " at step "
              << record.trajectory.max_fidelity_step << "\n";
    return 0;
}

int cmd_noise_sweep(const CommandOpts& opts) {
    const RunConfig cfg = resolve_config(opts);
    const fs::path dir = cfg.out_dir;
    const Mlp net = load_net_for(cfg, opts.checkpoint);
    const Environment env = Environment::from_config(cfg);
    const auto tasks = build_test_tasks(cfg, true);

    // clean-designed action sequences, frozen before any replay
    const auto records = evaluate_set(net, env, tasks, cfg.agent.max_steps_per_episode, cfg.jobs);
    const EvalSummary clean = summarize(records, cfg.histogram_bins, cfg.agent.success_threshold);
    std::vector<std::vector<int>> actions;
    actions.reserve(records.size());
    for (const auto& r : records) actions.push_back(r.trajectory.actions);

    std::vector<std::string> outputs;
    for (NoiseChannel channel : {NoiseChannel::exchange, NoiseChannel::zeeman}) {
        for (NoiseKind kind : {NoiseKind::static_drift, NoiseKind::dynamic_gaussian}) {
            const auto rows = evaluate_under_noise(
                env, tasks, actions, clean.average_max_fidelity, channel, kind,
                cfg.noise.amplitudes, cfg.noise.realizations, cfg.seed,
                cfg.noise.recompute_j12, cfg.jobs);
            const std::string name = std::string("noise_") + to_string(channel) + "_" +
                                     to_string(kind) + ".csv";
            write_sweep_csv(dir / name, rows);
            outputs.push_back(name);
        }
    }
    write_manifest(dir / "manifest.json", "noise-sweep", cfg, file_hash_hex(opts.checkpoint),
                   outputs);
    std::cout << "swept " << cfg.noise.amplitudes.size() << " amplitudes x 4 channels over "
              << tasks.size() << " tasks (clean average " << clean.average_max_fidelity << ")\n";
    return 0;
}

int cmd_baseline(const CommandOpts& opts) {
    const RunConfig cfg = resolve_config(opts);
    const fs::path dir = cfg.out_dir;
    const Environment env = Environment::from_config(cfg);
    const auto tasks = build_test_tasks(cfg, true);

    const int slices = cfg.agent.max_steps_per_episode;
    const double lower = cfg.agent.allowed_actions.front();
    const double upper = cfg.agent.allowed_actions.back();

    struct BaselineRecord {
        EvalRecord eval;
        double continuous_fidelity = 0.0;
        int iterations = 0;
    };
    std::vector<BaselineRecord> results(tasks.size());
    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const GrapeRun run = grape_optimize(tasks[i], cfg.grape, slices, lower, upper,
                                            cfg.agent.action_duration,
                                            derive_seed(cfg.seed, {seed_tags::grape, i}));
        const auto snapped = discretize_to_allowed(run.sequence, env.alphabet());
        BaselineRecord& r = results[i];
        r.eval.task_index = static_cast<int>(i);
        r.eval.trajectory = replay_actions(env, tasks[i], snapped);
        r.eval.design_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.continuous_fidelity = run.continuous_fidelity;
        r.iterations = run.iterations;
    });

    // the baseline metric is the final-time fidelity of the snapped sequence
    EvalSummary summary;
    summary.tasks = static_cast<int>(results.size());
    summary.histogram.assign(static_cast<std::size_t>(cfg.histogram_bins), 0);
    std::vector<nlohmann::json> lines;
    lines.reserve(results.size());
    int successes = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const BaselineRecord& r = results[i];
        const double f = r.eval.trajectory.final_fidelity;
        summary.average_max_fidelity += f;
        summary.average_design_seconds += r.eval.design_seconds;
        if (f >= cfg.agent.success_threshold) ++successes;
        int bin = static_cast<int>(f * cfg.histogram_bins);
        bin = std::min(std::max(bin, 0), cfg.histogram_bins - 1);
        ++summary.histogram[static_cast<std::size_t>(bin)];

        nlohmann::json j = trajectory_record(r.eval, tasks[i], cfg.system);
        j["continuous_fidelity"] = r.continuous_fidelity;
        j["iterations"] = r.iterations;
        lines.push_back(std::move(j));
    }
    if (summary.tasks > 0) {
        summary.average_max_fidelity /= summary.tasks;
        summary.average_design_seconds /= summary.tasks;
        summary.success_rate = static_cast<double>(successes) / summary.tasks;
    }

    std::vector<std::string> outputs = {"grape_results.jsonl", "histogram.csv", "summary.txt"};
    write_jsonl(dir / "grape_results.jsonl", lines);
    write_histogram_csv(dir / "histogram.csv", summary.histogram);
    write_summary(dir / "summary.txt", summary);
    write_manifest(dir / "manifest.json", "baseline", cfg, "", outputs);

    std::cout << "optimized " << summary.tasks << " tasks: average snapped fidelity "
              << summary.average_max_fidelity << ", average optimization time "
              << summary.average_design_seconds << " s\n";
    return 0;
}

}  // namespace

std::vector<PreparationTask> build_train_tasks(const RunConfig& cfg) {
    if (cfg.system == SystemKind::single_qubit) {
        return tasks_from_bloch(single_qubit_train_grid().points, cfg.target_state);
    }
    const auto points = two_qubit_point_set();
    const auto [train, test] =
        split_train_test(points, static_cast<std::size_t>(cfg.agent.points_for_training),
                         derive_seed(cfg.seed, {seed_tags::split}));
    return tasks_from_hypersphere(train.points, cfg.target_state);
}

std::vector<PreparationTask> build_test_tasks(const RunConfig& cfg, bool apply_subsample) {
    std::vector<PreparationTask> tasks;
    if (cfg.system == SystemKind::single_qubit) {
        tasks = tasks_from_bloch(single_qubit_test_grid().points, cfg.target_state);
    } else {
        const auto points = two_qubit_point_set();
        const auto [train, test] =
            split_train_test(points, static_cast<std::size_t>(cfg.agent.points_for_training),
                             derive_seed(cfg.seed, {seed_tags::split}));
        tasks = tasks_from_hypersphere(test.points, cfg.target_state);
    }
    if (apply_subsample && cfg.eval_subsample > 0 &&
        static_cast<std::size_t>(cfg.eval_subsample) < tasks.size()) {
        const auto keep = sample_without_replacement(
            tasks.size(), static_cast<std::size_t>(cfg.eval_subsample),
            derive_seed(cfg.seed, {seed_tags::subsample}));
        std::vector<PreparationTask> subset;
        subset.reserve(keep.size());
        for (std::size_t i : keep) subset.push_back(tasks[i]);
        tasks = std::move(subset);
    }
    return tasks;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"usp - universal state preparation for singlet-triplet qubits"};
    app.require_subcommand(1);

    CommandOpts train_opts, eval_opts, sweep_opts, baseline_opts;
    DesignOpts design_opts;

    auto* train = app.add_subcommand("train", "train a preparation policy");
    add_common(train, train_opts, false);
    auto* evaluate = app.add_subcommand("evaluate", "greedy evaluation over the test set");
    add_common(evaluate, eval_opts, true);
    auto* design = app.add_subcommand("design", "design one control trajectory");
    add_common(design, design_opts.common, true);
    design->add_option("--theta", design_opts.theta, "Bloch polar angle of the initial state");
    design->add_option("--phi", design_opts.phi, "Bloch azimuthal angle of the initial state");
    design->add_option("--thetas", design_opts.thetas, "hypersphere angles t1,t2,t3")
        ->delimiter(',');
    design->add_option("--phases", design_opts.phases, "phase indices b1,b2,b3,b4 (0..3)")
        ->delimiter(',');
    design->add_flag("--bloch-trail", design_opts.want_bloch_trail,
                     "request the Bloch trail explicitly");
    auto* sweep = app.add_subcommand("noise-sweep", "replay designed pulses under imperfections");
    add_common(sweep, sweep_opts, true);
    auto* baseline = app.add_subcommand("baseline", "GRAPE baseline over the test set");
    add_common(baseline, baseline_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (train->parsed()) return cmd_train(train_opts);
        if (evaluate->parsed()) return cmd_evaluate(eval_opts);
        if (design->parsed()) return cmd_design(design_opts);
        if (sweep->parsed()) return cmd_noise_sweep(sweep_opts);
        if (baseline->parsed()) return cmd_baseline(baseline_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("usp");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace usp
