#include "usp/dqn.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace usp {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay memory capacity must be >= 1");
    buffer_.reserve(capacity);
}

void ReplayMemory::push(Experience e) {
    if (buffer_.size() < capacity_) {
        buffer_.push_back(std::move(e));
    } else {
        buffer_[head_] = std::move(e);  // overwrite the oldest slot
        head_ = (head_ + 1) % capacity_;
    }
}

const Experience& ReplayMemory::at(std::size_t i) const {
    if (i >= buffer_.size()) throw std::out_of_range("replay memory index out of range");
    return buffer_[(head_ + i) % buffer_.size()];
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t k, Rng& rng) const {
    const std::size_t n = buffer_.size();
    if (k > n) throw std::invalid_argument("cannot sample more experiences than stored");
    std::vector<std::size_t> out;
    out.reserve(k);
    std::unordered_set<std::size_t> seen;
    for (std::size_t i = n - k; i < n; ++i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        if (seen.insert(j).second) {
            out.push_back(j);
        } else {
            seen.insert(i);
            out.push_back(i);
        }
    }
    return out;
}

Eigen::VectorXd encode_state(const StateVector& s) {
    Eigen::VectorXd v(2 * s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        v(2 * i) = s(i).real();
        v(2 * i + 1) = s(i).imag();
    }
    return v;
}

int argmax_action(const Eigen::VectorXd& q_values) {
    if (q_values.size() == 0) throw std::invalid_argument("empty Q-value vector");
    int best = 0;
    for (int i = 1; i < q_values.size(); ++i) {
        if (q_values(i) > q_values(best)) best = i;
    }
    return best;
}

int select_action(const Eigen::VectorXd& q_values, EpsilonSchedule& sched, Rng& rng) {
    if (q_values.size() == 0) throw std::invalid_argument("empty Q-value vector");
    if (sched.epsilon >= 1.0) {
        return argmax_action(q_values);
    }
    const int action = (rng.uniform() < 1.0 - sched.epsilon)
                           ? static_cast<int>(rng.below(static_cast<std::uint64_t>(q_values.size())))
                           : argmax_action(q_values);
    sched.advance();
    return action;
}

double td_target(const Experience& e, const Mlp& target_net, double gamma) {
    if (e.terminal) return e.reward;
    return e.reward + gamma * target_net.forward(e.next_state).maxCoeff();
}

std::optional<double> train_step(Mlp& main_net, const Mlp& target_net, const ReplayMemory& memory,
                                 int batch_size, double gamma, double learning_rate, Rng& rng) {
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (memory.size() < static_cast<std::size_t>(batch_size)) {
        return std::nullopt;
    }
    const auto indices = memory.sample_indices(static_cast<std::size_t>(batch_size), rng);
    const Eigen::Index n = static_cast<Eigen::Index>(indices.size());
    const Eigen::Index in_dim = main_net.input_size();

    Eigen::MatrixXd states(in_dim, n);
    Eigen::MatrixXd next_states(in_dim, n);
    std::vector<int> actions(indices.size());
    Eigen::VectorXd rewards(n);
    std::vector<bool> terminal(indices.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Experience& e = memory.at(indices[static_cast<std::size_t>(i)]);
        states.col(i) = e.state;
        next_states.col(i) = e.next_state;
        actions[static_cast<std::size_t>(i)] = e.action;
        rewards(i) = e.reward;
        terminal[static_cast<std::size_t>(i)] = e.terminal;
    }

    const Eigen::MatrixXd q_next = target_net.forward_batch(next_states);
    Eigen::VectorXd targets(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        targets(i) = terminal[static_cast<std::size_t>(i)]
                         ? rewards(i)
                         : rewards(i) + gamma * q_next.col(i).maxCoeff();
    }

    Mlp::Gradients grads;
    const double loss = main_net.backward(states, actions, targets, grads);
    main_net.apply_sgd(grads, learning_rate);
    return loss;
}

bool maybe_sync_target(std::uint64_t step_counter, int replace_period, const Mlp& main_net,
                       Mlp& target_net) {
    if (replace_period < 1) throw std::invalid_argument("replace period must be >= 1");
    if (step_counter % static_cast<std::uint64_t>(replace_period) != 0) return false;
    target_net = main_net;
    return true;
}

}  // namespace usp
