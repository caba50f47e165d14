#pragma once

#include <cstdint>
#include <vector>

#include "usp/config.hpp"
#include "usp/quantum.hpp"
#include "usp/rng.hpp"

namespace usp {

class Environment;
struct PreparationTask;

enum class NoiseChannel { exchange, zeeman };      // J or h
enum class NoiseKind { static_drift, dynamic_gaussian };

const char* to_string(NoiseChannel c);
const char* to_string(NoiseKind k);

// One imperfection: a static drift of amplitude delta or dynamic Gaussian
// fluctuations with standard deviation sigma, applied to J or h. Static
// drifts hit both qubits identically; dynamic draws are independent per
// qubit and per step (held constant within a step).
struct NoiseSpec {
    NoiseChannel channel = NoiseChannel::exchange;
    NoiseKind kind = NoiseKind::static_drift;
    double amplitude = 0.0;  // delta (static, may be negative) or sigma (dynamic, >= 0)
    std::uint64_t seed = 0;  // base seed for dynamic draws
};

// Additive offsets for one time step.
struct StepDeltas {
    double dj1 = 0.0, dj2 = 0.0;  // single-qubit runs use the *1 slots
    double dh1 = 0.0, dh2 = 0.0;
};

// Offsets for one step: constant for static drifts, fresh normal draws for
// dynamic noise (rng required in that case).
StepDeltas noise_step_deltas(const NoiseSpec& spec, SystemKind system, Rng* rng);

MatrixC perturbed_hamiltonian(const SingleQubitParams& base, const StepDeltas& d);
// recompute_j12 keeps the J12 = J1*J2/2 convention under perturbed couplings.
MatrixC perturbed_hamiltonian(const TwoQubitParams& base, const StepDeltas& d,
                              bool recompute_j12 = true);

// Replays a clean-designed action sequence under perturbed dynamics and
// returns the maximum fidelity along the trail (the decisions are fixed,
// only the evolution changes).
double replay_max_fidelity(const Environment& env, const PreparationTask& task,
                           const std::vector<int>& actions, const NoiseSpec& spec,
                           std::uint64_t realization_seed, bool recompute_j12);

struct SweepRow {
    NoiseChannel channel;
    NoiseKind kind;
    double amplitude = 0.0;
    int realizations = 1;
    double average_fidelity = 0.0;
    double clean_average = 0.0;
};

// Clean-designs every task once, then replays the frozen action sequences
// under each amplitude. Dynamic rows average `realizations` independent
// draws per task; seeds are derived per (task, amplitude, realization), so
// the result does not depend on scheduling.
std::vector<SweepRow> evaluate_under_noise(const Environment& env,
                                           const std::vector<PreparationTask>& tasks,
                                           const std::vector<std::vector<int>>& clean_actions,
                                           double clean_average, NoiseChannel channel,
                                           NoiseKind kind, const std::vector<double>& amplitudes,
                                           int realizations, std::uint64_t master_seed,
                                           bool recompute_j12, int jobs);

}  // namespace usp
