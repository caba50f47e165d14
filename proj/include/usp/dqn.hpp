#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "usp/mlp.hpp"
#include "usp/quantum.hpp"
#include "usp/rng.hpp"

namespace usp {

// One transition. States are stored pre-encoded (Re/Im interleaved).
struct Experience {
    Eigen::VectorXd state;
    int action = 0;
    double reward = 0.0;
    Eigen::VectorXd next_state;
    bool terminal = false;
};

// Bounded FIFO buffer: once full, the oldest experience is evicted first.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Experience e);
    std::size_t size() const { return buffer_.size(); }
    std::size_t capacity() const { return capacity_; }

    // i = 0 is the oldest stored experience.
    const Experience& at(std::size_t i) const;

    // Uniform sample of k distinct indices (Floyd's algorithm).
    std::vector<std::size_t> sample_indices(std::size_t k, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // slot that holds the oldest entry
    std::vector<Experience> buffer_;
};

// Exploitation probability ramp. The convention is inverted relative to the
// usual epsilon-greedy: epsilon is the probability of acting greedily, it
// starts at 0 and anneals up to epsilon_max during training, and is pinned
// to 1 in testing mode.
struct EpsilonSchedule {
    double epsilon = 0.0;
    double increment = 0.0;
    double max_epsilon = 0.0;

    void advance() { epsilon = std::min(epsilon + increment, max_epsilon); }

    static EpsilonSchedule training(double increment, double max_epsilon) {
        return {0.0, increment, max_epsilon};
    }
    static EpsilonSchedule testing() { return {1.0, 0.0, 1.0}; }
};

// (Re a_0, Im a_0, ..., Re a_{d-1}, Im a_{d-1}); no phase canonicalization.
Eigen::VectorXd encode_state(const StateVector& s);

// Lowest-index argmax.
int argmax_action(const Eigen::VectorXd& q_values);

// With probability 1 - epsilon a uniformly random action, otherwise the
// greedy one; advances the schedule after the draw. At epsilon >= 1 this is
// a pure function of q_values and consumes no randomness.
int select_action(const Eigen::VectorXd& q_values, EpsilonSchedule& sched, Rng& rng);

// r for terminal transitions, else r + gamma * max_a' Q_target(s', a').
double td_target(const Experience& e, const Mlp& target_net, double gamma);

// One mini-batch update of the main net: sample batch_size experiences
// without replacement, form TD targets from the target net, take one
// gradient-descent step. No-op (nullopt) while the memory holds fewer than
// batch_size experiences. The target net is never touched.
std::optional<double> train_step(Mlp& main_net, const Mlp& target_net, const ReplayMemory& memory,
                                 int batch_size, double gamma, double learning_rate, Rng& rng);

// Copies main into target whenever the global step counter is a multiple of
// the replace period. Returns whether a sync happened.
bool maybe_sync_target(std::uint64_t step_counter, int replace_period, const Mlp& main_net,
                       Mlp& target_net);

}  // namespace usp
