#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace usp {

// Layer widths: input, hidden..., output. Hidden layers are ReLU, the output
// layer is linear (Q-values are unbounded).
struct LayerSpec {
    std::vector<int> sizes;
    bool valid() const;
};

// Minimal feed-forward network trained with plain mini-batch gradient
// descent. Double precision throughout. Copy construction is a deep copy,
// which is exactly what the target-network snapshot needs.
class Mlp {
public:
    Mlp() = default;

    // He-style initialization: weights ~ N(0, 2/fan_in), biases zero.
    static Mlp random_init(const LayerSpec& spec, std::uint64_t seed);

    Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

    // Column-per-sample batch forward.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

    struct Gradients {
        std::vector<Eigen::MatrixXd> weights;
        std::vector<Eigen::VectorXd> biases;
    };

    // Exact gradient of the mean-squared TD loss
    //   L = (1/N) sum_i (target_i - Q(input_i)[action_i])^2
    // with respect to every weight and bias. Gradient flows only through the
    // taken-action output of each sample. Returns the batch loss.
    double backward(const Eigen::MatrixXd& inputs, const std::vector<int>& actions,
                    const Eigen::VectorXd& targets, Gradients& grads) const;

    // params <- params - alpha * gradient
    void apply_sgd(const Gradients& grads, double alpha);

    const LayerSpec& spec() const { return spec_; }
    int input_size() const { return spec_.sizes.front(); }
    int output_size() const { return spec_.sizes.back(); }
    std::size_t layer_count() const { return weights_.size(); }

    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

    void set_params(LayerSpec spec, std::vector<Eigen::MatrixXd> w, std::vector<Eigen::VectorXd> b);

private:
    LayerSpec spec_;
    std::vector<Eigen::MatrixXd> weights_;  // weights_[l]: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases_;
};

// (1/N) sum_i (target_i - pred_i)^2; rejects empty or mismatched batches.
double mse_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target);

}  // namespace usp
