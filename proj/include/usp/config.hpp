#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usp/quantum.hpp"

namespace usp {

enum class SystemKind { single_qubit, two_qubit };
enum class TargetKind { zero, one, bell, custom };

const char* to_string(SystemKind k);
const char* to_string(TargetKind k);

// Hyperparameters of one training/design run. Field names mirror the
// configuration file keys.
struct AgentConfig {
    std::vector<double> allowed_actions;  // J values; two-qubit pairs are the
                                          // ordered cross product of this list
    int points_for_training = 32;
    int points_for_testing = 320;
    int batch_size = 32;
    int memory_size = 2000;
    double learning_rate = 1e-4;
    int replace_period = 250;
    double max_reward = 5000.0;
    double discount_factor = 0.9;
    std::vector<int> hidden_layers = {20, 20};
    double epsilon_increment = 0.001;
    double epsilon_max = 0.99;
    double epsilon_testing = 1.0;
    int max_steps_per_episode = 40;
    int episodes_per_training_point = 100;
    double total_time = M_PI;
    double action_duration = M_PI / 40.0;
    double success_threshold = 0.99;
};

struct NoiseSweepConfig {
    std::vector<double> amplitudes = {0.0, 0.02, 0.04, 0.06, 0.08, 0.10,
                                      0.12, 0.14, 0.16, 0.18, 0.20};
    int realizations = 1;     // dynamic draws averaged per task
    bool recompute_j12 = true;  // J12 = (J1+d1)(J2+d2)/2 under exchange noise
};

struct GrapeSettings {
    double step_size = 0.1;
    int max_iterations = 500;
    double tolerance = 1e-6;  // on the projected gradient norm
    int restarts = 1;
};

struct RunConfig {
    SystemKind system = SystemKind::single_qubit;
    TargetKind target = TargetKind::zero;
    StateVector target_state;  // resolved amplitudes, unit norm
    AgentConfig agent;
    std::uint64_t seed = 1;
    int eval_subsample = 0;  // 0 = evaluate the full test set
    int histogram_bins = 50;
    NoiseSweepConfig noise;
    GrapeSettings grape;
    std::string out_dir = "out";
    int jobs = 1;

    int state_dim() const { return system == SystemKind::single_qubit ? 2 : 4; }
    int action_count() const;
    int max_episode_steps() const { return agent.max_steps_per_episode; }
};

// Table-1 defaults for the built-in targets.
RunConfig default_config(SystemKind system, TargetKind target);

// Parses a `key = value` file ('#' comments). Unknown keys and malformed
// values are reported by name. Unspecified fields keep the defaults of the
// chosen system/target.
RunConfig load_run_config(const std::string& path);

// Applies one key=value assignment (also used for CLI overrides).
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// Re-derives defaults that depend on system/target and validates invariants.
void finalize_config(RunConfig& cfg);

// Canonical sorted key=value rendering of everything that affects results;
// input to the manifest and the config hash.
std::string canonical_text(const RunConfig& cfg);

// Built-in target amplitudes.
StateVector target_state_for(SystemKind system, TargetKind target);

// Accepts "0.25", "pi", "2pi", "pi/40", "10pi" style durations.
double parse_duration(const std::string& text);

}  // namespace usp
