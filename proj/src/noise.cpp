#include "usp/noise.hpp"

#include <stdexcept>

#include "usp/environment.hpp"
#include "usp/parallel.hpp"

namespace usp {

const char* to_string(NoiseChannel c) {
    return c == NoiseChannel::exchange ? "J" : "h";
}

const char* to_string(NoiseKind k) {
    return k == NoiseKind::static_drift ? "static" : "dynamic";
}

StepDeltas noise_step_deltas(const NoiseSpec& spec, SystemKind system, Rng* rng) {
    StepDeltas d;
    if (spec.amplitude == 0.0) return d;
    if (spec.kind == NoiseKind::static_drift) {
        // identical drift on both qubits
        if (spec.channel == NoiseChannel::exchange) {
            d.dj1 = d.dj2 = spec.amplitude;
        } else {
            d.dh1 = d.dh2 = spec.amplitude;
        }
        return d;
    }
    if (spec.amplitude < 0.0) throw std::invalid_argument("dynamic noise sigma must be >= 0");
    if (!rng) throw std::invalid_argument("dynamic noise requires a random source");
    const bool two = system == SystemKind::two_qubit;
    if (spec.channel == NoiseChannel::exchange) {
        d.dj1 = rng->normal(0.0, spec.amplitude);
        if (two) d.dj2 = rng->normal(0.0, spec.amplitude);  // independent per qubit
    } else {
        d.dh1 = rng->normal(0.0, spec.amplitude);
        if (two) d.dh2 = rng->normal(0.0, spec.amplitude);
    }
    return d;
}

MatrixC perturbed_hamiltonian(const SingleQubitParams& base, const StepDeltas& d) {
    return single_qubit_hamiltonian(base.j + d.dj1, base.h + d.dh1);
}

MatrixC perturbed_hamiltonian(const TwoQubitParams& base, const StepDeltas& d,
                              bool recompute_j12) {
    const double j1 = base.j1 + d.dj1;
    const double j2 = base.j2 + d.dj2;
    const double j12 = recompute_j12 ? j1 * j2 / 2.0 : base.j12();
    return two_qubit_hamiltonian(j1, j2, base.h1 + d.dh1, base.h2 + d.dh2, j12);
}

double replay_max_fidelity(const Environment& env, const PreparationTask& task,
                           const std::vector<int>& actions, const NoiseSpec& spec,
                           std::uint64_t realization_seed, bool recompute_j12) {
    Rng rng(realization_seed);
    StateVector s = task.initial;
    double best = fidelity(env.target(), s);
    for (int a : actions) {
        const StepDeltas d = noise_step_deltas(
            spec, env.system(), spec.kind == NoiseKind::dynamic_gaussian ? &rng : nullptr);
        const StepOutcome out = env.step(s, a, d, recompute_j12);
        best = std::max(best, out.fidelity);
        s = out.next;
    }
    return best;
}

std::vector<SweepRow> evaluate_under_noise(const Environment& env,
                                           const std::vector<PreparationTask>& tasks,
                                           const std::vector<std::vector<int>>& clean_actions,
                                           double clean_average, NoiseChannel channel,
                                           NoiseKind kind, const std::vector<double>& amplitudes,
                                           int realizations, std::uint64_t master_seed,
                                           bool recompute_j12, int jobs) {
    if (tasks.size() != clean_actions.size()) {
        throw std::invalid_argument("one clean action sequence per task required");
    }
    const int reps = kind == NoiseKind::dynamic_gaussian ? realizations : 1;
    std::vector<SweepRow> rows;
    rows.reserve(amplitudes.size());
    for (std::size_t ai = 0; ai < amplitudes.size(); ++ai) {
        SweepRow row;
        row.channel = channel;
        row.kind = kind;
        row.amplitude = amplitudes[ai];
        row.realizations = reps;
        row.clean_average = clean_average;
        if (!tasks.empty()) {
            std::vector<double> per_task(tasks.size(), 0.0);
            parallel_for(tasks.size(), jobs, [&](std::size_t t) {
                NoiseSpec spec{channel, kind, amplitudes[ai], master_seed};
                double sum = 0.0;
                for (int r = 0; r < reps; ++r) {
                    const std::uint64_t seed = derive_seed(
                        master_seed, {seed_tags::noise, static_cast<std::uint64_t>(ai),
                                      static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(r)});
                    sum += replay_max_fidelity(env, tasks[t], clean_actions[t], spec, seed,
                                               recompute_j12);
                }
                per_task[t] = sum / reps;
            });
            double total = 0.0;
            for (double f : per_task) total += f;
            row.average_fidelity = total / static_cast<double>(tasks.size());
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace usp
