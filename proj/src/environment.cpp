#include "usp/environment.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "usp/parallel.hpp"

namespace usp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

double ActionAlphabet::j1(int action) const {
    const int n = static_cast<int>(values.size());
    if (action < 0 || action >= size()) throw std::invalid_argument("action index out of range");
    return system == SystemKind::single_qubit ? values[static_cast<std::size_t>(action)]
                                              : values[static_cast<std::size_t>(action / n)];
}

double ActionAlphabet::j2(int action) const {
    const int n = static_cast<int>(values.size());
    if (system != SystemKind::two_qubit) throw std::logic_error("j2 is a two-qubit pulse");
    if (action < 0 || action >= size()) throw std::invalid_argument("action index out of range");
    return values[static_cast<std::size_t>(action % n)];
}

std::array<double, 2> ActionAlphabet::pulse(int action) const {
    if (system == SystemKind::single_qubit) return {j1(action), 0.0};
    return {j1(action), j2(action)};
}

double reward_single(double fidelity, double threshold, double bonus) {
    if (fidelity < 0.0 || fidelity > 1.0 + 1e-12) {
        throw std::invalid_argument("fidelity must lie in [0, 1]");
    }
    return fidelity >= threshold ? bonus : 100.0 * fidelity * fidelity * fidelity;
}

double reward_two(double fidelity, double threshold, double bonus) {
    if (fidelity < 0.0 || fidelity > 1.0 + 1e-12) {
        throw std::invalid_argument("fidelity must lie in [0, 1]");
    }
    return fidelity >= threshold ? bonus : 1000.0 * fidelity;
}

Environment::Environment(SystemKind system, ActionAlphabet alphabet, double dt,
                         StateVector target, double threshold, double max_reward)
    : system_(system),
      alphabet_(std::move(alphabet)),
      dt_(dt),
      target_(std::move(target)),
      threshold_(threshold),
      max_reward_(max_reward) {
    if (alphabet_.system != system_) throw std::invalid_argument("alphabet/system mismatch");
    if (dt_ <= 0.0) throw std::invalid_argument("step duration must be positive");
    check_state(target_);
    if (target_.size() != dim()) throw std::invalid_argument("target dimension/system mismatch");

    propagators_.reserve(static_cast<std::size_t>(alphabet_.size()));
    for (int a = 0; a < alphabet_.size(); ++a) {
        if (system_ == SystemKind::single_qubit) {
            propagators_.push_back(propagator_su2(SingleQubitParams{alphabet_.j1(a), 1.0}, dt_));
        } else {
            const TwoQubitParams p{alphabet_.j1(a), alphabet_.j2(a), 1.0, 1.0};
            propagators_.push_back(propagator_eig(build_h2(p), dt_));
        }
    }
}

Environment Environment::from_config(const RunConfig& cfg) {
    ActionAlphabet alphabet{cfg.system, cfg.agent.allowed_actions};
    return Environment(cfg.system, std::move(alphabet), cfg.agent.action_duration,
                       cfg.target_state, cfg.agent.success_threshold, cfg.agent.max_reward);
}

const MatrixC& Environment::propagator(int action) const {
    if (action < 0 || action >= alphabet_.size()) {
        throw std::invalid_argument("action index out of range");
    }
    return propagators_[static_cast<std::size_t>(action)];
}

double Environment::reward_for(double fidelity) const {
    return system_ == SystemKind::single_qubit
               ? reward_single(fidelity, threshold_, max_reward_)
               : reward_two(fidelity, threshold_, max_reward_);
}

StepOutcome Environment::step(const StateVector& s, int action) const {
    StepOutcome out;
    out.next = evolve_step(s, propagator(action));
    out.fidelity = fidelity(target_, out.next);
    out.reward = reward_for(out.fidelity);
    out.terminal = out.fidelity >= threshold_;
    return out;
}

StepOutcome Environment::step(const StateVector& s, int action, const StepDeltas& noise,
                              bool recompute_j12) const {
    MatrixC u;
    if (system_ == SystemKind::single_qubit) {
        const SingleQubitParams base{alphabet_.j1(action), 1.0};
        // still of the form J' sz + h' sx, so the closed form applies
        u = propagator_su2(base.j + noise.dj1, base.h + noise.dh1, dt_);
    } else {
        const TwoQubitParams base{alphabet_.j1(action), alphabet_.j2(action), 1.0, 1.0};
        u = propagator_eig(perturbed_hamiltonian(base, noise, recompute_j12), dt_);
    }
    StepOutcome out;
    out.next = evolve_step(s, u);
    out.fidelity = fidelity(target_, out.next);
    out.reward = reward_for(out.fidelity);
    out.terminal = out.fidelity >= threshold_;
    return out;
}

EpisodeResult run_episode_greedy(const Mlp& net, const Environment& env,
                                 const PreparationTask& task, int max_steps, double gamma) {
    EpisodeResult result;
    ControlTrajectory& traj = result.trajectory;
    traj.initial_fidelity = fidelity(env.target(), task.initial);
    traj.max_fidelity = traj.initial_fidelity;
    traj.max_fidelity_step = 0;
    traj.final_fidelity = traj.initial_fidelity;

    StateVector s = task.initial;
    double discount = 1.0;
    for (int t = 1; t <= max_steps; ++t) {
        const int a = argmax_action(net.forward(encode_state(s)));
        const StepOutcome out = env.step(s, a);
        traj.actions.push_back(a);
        traj.pulses.push_back(env.alphabet().pulse(a));
        traj.fidelity_per_step.push_back(out.fidelity);
        if (out.fidelity > traj.max_fidelity) {
            traj.max_fidelity = out.fidelity;
            traj.max_fidelity_step = t;
        }
        result.discounted_return += discount * out.reward;
        discount *= gamma;
        s = out.next;
        traj.final_fidelity = out.fidelity;
        if (out.terminal) {
            result.success = true;
            break;
        }
    }
    return result;
}

ControlTrajectory design_trajectory(const Mlp& net, const Environment& env,
                                    const PreparationTask& task, int max_steps,
                                    double* design_seconds) {
    const auto t0 = Clock::now();
    ControlTrajectory traj;
    traj.initial_fidelity = fidelity(env.target(), task.initial);
    traj.max_fidelity = traj.initial_fidelity;
    traj.max_fidelity_step = 0;
    traj.final_fidelity = traj.initial_fidelity;
    if (traj.initial_fidelity >= env.threshold()) {
        if (design_seconds) *design_seconds = seconds_since(t0);
        return traj;  // nothing to design
    }

    StateVector s = task.initial;
    for (int t = 1; t <= max_steps; ++t) {
        const int a = argmax_action(net.forward(encode_state(s)));
        const StepOutcome out = env.step(s, a);
        traj.actions.push_back(a);
        traj.pulses.push_back(env.alphabet().pulse(a));
        traj.fidelity_per_step.push_back(out.fidelity);
        if (out.fidelity > traj.max_fidelity) {
            traj.max_fidelity = out.fidelity;
            traj.max_fidelity_step = t;
        }
        traj.final_fidelity = out.fidelity;
        s = out.next;
        if (out.terminal) break;
    }
    if (design_seconds) *design_seconds = seconds_since(t0);
    return traj;
}

UspTrainer::UspTrainer(const RunConfig& cfg, std::uint64_t seed)
    : cfg_(cfg.agent),
      env_(Environment::from_config(cfg)),
      seed_(seed),
      main_(Mlp::random_init(
          [&] {
              LayerSpec spec;
              spec.sizes.push_back(2 * cfg.state_dim());
              for (int w : cfg.agent.hidden_layers) spec.sizes.push_back(w);
              spec.sizes.push_back(cfg.action_count());
              return spec;
          }(),
          derive_seed(seed, {seed_tags::net_init}))),
      target_(main_),
      memory_(static_cast<std::size_t>(cfg.agent.memory_size)),
      eps_(EpsilonSchedule::training(cfg.agent.epsilon_increment, cfg.agent.epsilon_max)),
      rng_(derive_seed(seed, {seed_tags::trainer})) {}

EpisodeResult UspTrainer::run_training_episode(const PreparationTask& task) {
    EpisodeResult result;
    ControlTrajectory& traj = result.trajectory;
    traj.initial_fidelity = fidelity(env_.target(), task.initial);
    traj.max_fidelity = traj.initial_fidelity;
    traj.max_fidelity_step = 0;
    traj.final_fidelity = traj.initial_fidelity;

    StateVector s = task.initial;
    Eigen::VectorXd enc = encode_state(s);
    double discount = 1.0;
    for (int t = 1; t <= cfg_.max_steps_per_episode; ++t) {
        const int a = select_action(main_.forward(enc), eps_, rng_);
        const StepOutcome out = env_.step(s, a);
        ++step_counter_;

        Eigen::VectorXd next_enc = encode_state(out.next);
        memory_.push(Experience{enc, a, out.reward, next_enc, out.terminal});
        const auto loss = train_step(main_, target_, memory_, cfg_.batch_size,
                                     cfg_.discount_factor, cfg_.learning_rate, rng_);
        if (live_report_ && loss && step_counter_ % 100 == 0) {
            live_report_->loss_samples.emplace_back(step_counter_, *loss);
        }
        maybe_sync_target(step_counter_, cfg_.replace_period, main_, target_);

        traj.actions.push_back(a);
        traj.pulses.push_back(env_.alphabet().pulse(a));
        traj.fidelity_per_step.push_back(out.fidelity);
        if (out.fidelity > traj.max_fidelity) {
            traj.max_fidelity = out.fidelity;
            traj.max_fidelity_step = t;
        }
        result.discounted_return += discount * out.reward;
        discount *= cfg_.discount_factor;
        traj.final_fidelity = out.fidelity;
        s = out.next;
        enc = std::move(next_enc);
        if (out.terminal) {
            result.success = true;
            break;
        }
    }
    return result;
}

TrainingReport UspTrainer::train(const std::vector<PreparationTask>& points) {
    TrainingReport report;
    live_report_ = &report;
    const auto t0 = Clock::now();
    for (std::size_t p = 0; p < points.size(); ++p) {
        reset_epsilon();
        TrainingReport::PointStats stats;
        stats.point_index = static_cast<int>(p);
        double steps_sum = 0.0;
        for (int ep = 0; ep < cfg_.episodes_per_training_point; ++ep) {
            const EpisodeResult r = run_training_episode(points[p]);
            ++stats.episodes;
            if (r.success) ++stats.successes;
            steps_sum += r.trajectory.steps();
        }
        stats.mean_steps = stats.episodes ? steps_sum / stats.episodes : 0.0;
        stats.final_epsilon = eps_.epsilon;
        report.points.push_back(stats);
    }
    report.total_env_steps = step_counter_;
    report.wall_seconds = seconds_since(t0);
    live_report_ = nullptr;
    return report;
}

std::vector<EvalRecord> evaluate_set(const Mlp& net, const Environment& env,
                                     const std::vector<PreparationTask>& tasks, int max_steps,
                                     int jobs) {
    std::vector<EvalRecord> records(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        EvalRecord& r = records[i];
        r.task_index = static_cast<int>(i);
        r.trajectory = design_trajectory(net, env, tasks[i], max_steps, &r.design_seconds);
    });
    return records;
}

EvalSummary summarize(const std::vector<EvalRecord>& records, int bins, double threshold) {
    EvalSummary s;
    s.tasks = static_cast<int>(records.size());
    s.histogram.assign(static_cast<std::size_t>(bins), 0);
    if (records.empty()) return s;
    double fid_sum = 0.0, time_sum = 0.0;
    int successes = 0;
    for (const auto& r : records) {
        const double f = r.trajectory.max_fidelity;
        fid_sum += f;
        time_sum += r.design_seconds;
        if (f >= threshold) ++successes;
        int bin = static_cast<int>(f * bins);
        bin = std::min(std::max(bin, 0), bins - 1);
        ++s.histogram[static_cast<std::size_t>(bin)];
    }
    s.average_max_fidelity = fid_sum / s.tasks;
    s.average_design_seconds = time_sum / s.tasks;
    s.success_rate = static_cast<double>(successes) / s.tasks;
    return s;
}

std::vector<PreparationTask> tasks_from_bloch(const std::vector<BlochPoint>& points,
                                              const StateVector& target) {
    std::vector<PreparationTask> tasks;
    tasks.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        PreparationTask t;
        t.initial = point_to_state(points[i]);
        t.target = target;
        t.system = SystemKind::single_qubit;
        t.point.system = SystemKind::single_qubit;
        t.point.index = static_cast<int>(i);
        t.point.bloch = points[i];
        tasks.push_back(std::move(t));
    }
    return tasks;
}

std::vector<PreparationTask> tasks_from_hypersphere(const std::vector<HyperspherePoint>& points,
                                                    const StateVector& target) {
    std::vector<PreparationTask> tasks;
    tasks.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        PreparationTask t;
        t.initial = point_to_state(points[i]);
        t.target = target;
        t.system = SystemKind::two_qubit;
        t.point.system = SystemKind::two_qubit;
        t.point.index = static_cast<int>(i);
        t.point.hyper = points[i];
        tasks.push_back(std::move(t));
    }
    return tasks;
}

ControlTrajectory replay_actions(const Environment& env, const PreparationTask& task,
                                 const std::vector<int>& actions) {
    ControlTrajectory traj;
    traj.initial_fidelity = fidelity(env.target(), task.initial);
    traj.max_fidelity = traj.initial_fidelity;
    traj.max_fidelity_step = 0;
    traj.final_fidelity = traj.initial_fidelity;
    StateVector s = task.initial;
    int t = 0;
    for (int a : actions) {
        const StepOutcome out = env.step(s, a);
        ++t;
        traj.actions.push_back(a);
        traj.pulses.push_back(env.alphabet().pulse(a));
        traj.fidelity_per_step.push_back(out.fidelity);
        if (out.fidelity > traj.max_fidelity) {
            traj.max_fidelity = out.fidelity;
            traj.max_fidelity_step = t;
        }
        traj.final_fidelity = out.fidelity;
        s = out.next;
    }
    return traj;
}

std::vector<BlochVector> bloch_trail(const Environment& env, const PreparationTask& task,
                                     const std::vector<int>& actions) {
    if (env.system() != SystemKind::single_qubit) {
        throw std::invalid_argument("Bloch trails are only defined for single-qubit states");
    }
    std::vector<BlochVector> trail;
    trail.reserve(actions.size() + 1);
    StateVector s = task.initial;
    trail.push_back(state_to_bloch(s));
    for (int a : actions) {
        s = evolve_step(s, env.propagator(a));
        trail.push_back(state_to_bloch(s));
    }
    return trail;
}

}  // namespace usp
