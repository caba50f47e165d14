#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "usp/config.hpp"
#include "usp/dqn.hpp"
#include "usp/mlp.hpp"
#include "usp/noise.hpp"
#include "usp/quantum.hpp"
#include "usp/task_sets.hpp"

namespace usp {

// Serializable identity of one preparation task.
struct TaskPoint {
    SystemKind system = SystemKind::single_qubit;
    int index = -1;  // position within its task set
    BlochPoint bloch;
    HyperspherePoint hyper;
};

struct PreparationTask {
    StateVector initial;
    StateVector target;
    SystemKind system = SystemKind::single_qubit;
    TaskPoint point;
};

// Discrete pulse alphabet. Single-qubit actions index the J list directly;
// two-qubit actions are the ordered cross product with
// index = n * i1 + i2 over the per-channel value list.
struct ActionAlphabet {
    SystemKind system = SystemKind::single_qubit;
    std::vector<double> values;

    int size() const {
        const int n = static_cast<int>(values.size());
        return system == SystemKind::single_qubit ? n : n * n;
    }
    double j1(int action) const;
    double j2(int action) const;  // two-qubit only
    std::array<double, 2> pulse(int action) const;
};

// 100 * F^3 below the threshold, the full bonus at or above it.
double reward_single(double fidelity, double threshold = 0.99, double bonus = 5000.0);
// 1000 * F below the threshold, the full bonus at or above it.
double reward_two(double fidelity, double threshold = 0.99, double bonus = 5000.0);

struct StepOutcome {
    StateVector next;
    double reward = 0.0;
    double fidelity = 0.0;
    bool terminal = false;
};

// Quantum dynamics plus reward under a fixed target. Clean propagators for
// the whole action alphabet are cached up front; perturbed steps rebuild the
// Hamiltonian with the per-step offsets.
class Environment {
public:
    Environment(SystemKind system, ActionAlphabet alphabet, double dt, StateVector target,
                double threshold, double max_reward);

    static Environment from_config(const RunConfig& cfg);

    StepOutcome step(const StateVector& s, int action) const;
    StepOutcome step(const StateVector& s, int action, const StepDeltas& noise,
                     bool recompute_j12) const;

    double reward_for(double fidelity) const;

    const StateVector& target() const { return target_; }
    const ActionAlphabet& alphabet() const { return alphabet_; }
    SystemKind system() const { return system_; }
    double dt() const { return dt_; }
    int dim() const { return system_ == SystemKind::single_qubit ? 2 : 4; }
    double threshold() const { return threshold_; }
    double max_reward() const { return max_reward_; }
    const MatrixC& propagator(int action) const;

private:
    SystemKind system_;
    ActionAlphabet alphabet_;
    double dt_;
    StateVector target_;
    double threshold_;
    double max_reward_;
    std::vector<MatrixC> propagators_;
};

struct ControlTrajectory {
    std::vector<int> actions;
    std::vector<std::array<double, 2>> pulses;
    std::vector<double> fidelity_per_step;
    double initial_fidelity = 0.0;
    double final_fidelity = 0.0;
    double max_fidelity = 0.0;
    int max_fidelity_step = 0;  // 0 refers to the initial state
    int steps() const { return static_cast<int>(actions.size()); }
};

struct EpisodeResult {
    ControlTrajectory trajectory;
    double discounted_return = 0.0;
    bool success = false;
};

// Pure-greedy rollout (epsilon = 1): always takes at least one step, stops
// on success or the step budget. Deterministic given the network.
EpisodeResult run_episode_greedy(const Mlp& net, const Environment& env,
                                 const PreparationTask& task, int max_steps, double gamma);

// Greedy rollout for the design/evaluation path: returns immediately (zero
// actions) when the initial state already satisfies the threshold, and
// tracks the maximum fidelity reached within the budget. Optionally reports
// the rollout wall-clock time.
ControlTrajectory design_trajectory(const Mlp& net, const Environment& env,
                                    const PreparationTask& task, int max_steps,
                                    double* design_seconds = nullptr);

struct TrainingReport {
    struct PointStats {
        int point_index = 0;
        int episodes = 0;
        int successes = 0;
        double mean_steps = 0.0;
        double final_epsilon = 0.0;
    };
    std::vector<PointStats> points;
    std::vector<std::pair<std::uint64_t, double>> loss_samples;
    std::uint64_t total_env_steps = 0;
    double wall_seconds = 0.0;
};

// Owns the full training state (nets, replay memory, epsilon schedule, step
// counter). Replay memory and the target-sync counter persist across
// training points; epsilon resets to 0 at each new point.
class UspTrainer {
public:
    UspTrainer(const RunConfig& cfg, std::uint64_t seed);

    EpisodeResult run_training_episode(const PreparationTask& task);
    TrainingReport train(const std::vector<PreparationTask>& points);

    const Mlp& main_net() const { return main_; }
    const Environment& env() const { return env_; }
    std::uint64_t seed() const { return seed_; }
    const EpsilonSchedule& epsilon() const { return eps_; }
    std::uint64_t step_counter() const { return step_counter_; }
    void reset_epsilon() { eps_ = EpsilonSchedule::training(cfg_.epsilon_increment, cfg_.epsilon_max); }

private:
    AgentConfig cfg_;
    Environment env_;
    std::uint64_t seed_;
    Mlp main_, target_;
    ReplayMemory memory_;
    EpsilonSchedule eps_;
    Rng rng_;
    std::uint64_t step_counter_ = 0;
    TrainingReport* live_report_ = nullptr;
};

struct EvalRecord {
    int task_index = 0;
    ControlTrajectory trajectory;
    double design_seconds = 0.0;
};

struct EvalSummary {
    int tasks = 0;
    double average_max_fidelity = 0.0;
    double average_design_seconds = 0.0;
    double success_rate = 0.0;  // fraction of tasks with max fidelity >= threshold
    std::vector<long> histogram;
};

// Independent greedy rollouts over the test set, parallel over tasks,
// results ordered by task index.
std::vector<EvalRecord> evaluate_set(const Mlp& net, const Environment& env,
                                     const std::vector<PreparationTask>& tasks, int max_steps,
                                     int jobs);

EvalSummary summarize(const std::vector<EvalRecord>& records, int bins, double threshold);

// Task construction helpers.
std::vector<PreparationTask> tasks_from_bloch(const std::vector<BlochPoint>& points,
                                              const StateVector& target);
std::vector<PreparationTask> tasks_from_hypersphere(const std::vector<HyperspherePoint>& points,
                                                    const StateVector& target);

// Replays a fixed action sequence under clean dynamics.
ControlTrajectory replay_actions(const Environment& env, const PreparationTask& task,
                                 const std::vector<int>& actions);

// Bloch coordinates of the initial state and of the state after each action
// (single-qubit only).
std::vector<BlochVector> bloch_trail(const Environment& env, const PreparationTask& task,
                                     const std::vector<int>& actions);

}  // namespace usp
