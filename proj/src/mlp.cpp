#include "usp/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "usp/rng.hpp"

namespace usp {

bool LayerSpec::valid() const {
    if (sizes.size() < 3) return false;  // at least one hidden layer
    for (int s : sizes) {
        if (s < 1) return false;
    }
    return true;
}

Mlp Mlp::random_init(const LayerSpec& spec, std::uint64_t seed) {
    if (!spec.valid()) {
        throw std::invalid_argument("layer spec needs widths >= 1 and at least one hidden layer");
    }
    Mlp net;
    net.spec_ = spec;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < spec.sizes.size(); ++l) {
        const int fan_in = spec.sizes[l];
        const int fan_out = spec.sizes[l + 1];
        const double scale = std::sqrt(2.0 / fan_in);
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) {
                w(r, c) = rng.normal(0.0, scale);
            }
        }
        net.weights_.push_back(std::move(w));
        net.biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return net;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
    return forward_batch(input).col(0);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& inputs) const {
    if (inputs.rows() != input_size()) {
        throw std::invalid_argument("input width does not match network spec");
    }
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
        if (l + 1 < weights_.size()) {
            a = z.cwiseMax(0.0);
        } else {
            a = std::move(z);
        }
    }
    return a;
}

double Mlp::backward(const Eigen::MatrixXd& inputs, const std::vector<int>& actions,
                     const Eigen::VectorXd& targets, Gradients& grads) const {
    const Eigen::Index n = inputs.cols();
    if (n == 0) {
        throw std::invalid_argument("empty batch");
    }
    if (static_cast<Eigen::Index>(actions.size()) != n || targets.size() != n) {
        throw std::invalid_argument("batch size mismatch between inputs, actions and targets");
    }
    if (inputs.rows() != input_size()) {
        throw std::invalid_argument("input width does not match network spec");
    }

    const std::size_t layers = weights_.size();
    std::vector<Eigen::MatrixXd> activations(layers + 1);
    std::vector<Eigen::MatrixXd> preacts(layers);
    activations[0] = inputs;
    for (std::size_t l = 0; l < layers; ++l) {
        preacts[l] = (weights_[l] * activations[l]).colwise() + biases_[l];
        activations[l + 1] = (l + 1 < layers) ? preacts[l].cwiseMax(0.0) : preacts[l];
    }

    const Eigen::MatrixXd& q = activations[layers];
    double loss = 0.0;
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int a = actions[static_cast<std::size_t>(i)];
        if (a < 0 || a >= q.rows()) {
            throw std::invalid_argument("action index out of range");
        }
        const double diff = targets(i) - q(a, i);
        loss += diff * diff;
        delta(a, i) = -2.0 * diff / static_cast<double>(n);  // dL/dQ(s_i, a_i)
    }
    loss /= static_cast<double>(n);

    grads.weights.resize(layers);
    grads.biases.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
        grads.weights[l].noalias() = delta * activations[l].transpose();
        grads.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = weights_[l].transpose() * delta;
            delta = back.cwiseProduct(
                (preacts[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return loss;
}

void Mlp::apply_sgd(const Gradients& grads, double alpha) {
    if (grads.weights.size() != weights_.size() || grads.biases.size() != biases_.size()) {
        throw std::invalid_argument("gradient shape mismatch");
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (grads.weights[l].rows() != weights_[l].rows() ||
            grads.weights[l].cols() != weights_[l].cols() ||
            grads.biases[l].size() != biases_[l].size()) {
            throw std::invalid_argument("gradient shape mismatch");
        }
        weights_[l] -= alpha * grads.weights[l];
        biases_[l] -= alpha * grads.biases[l];
    }
}

void Mlp::set_params(LayerSpec spec, std::vector<Eigen::MatrixXd> w,
                     std::vector<Eigen::VectorXd> b) {
    if (!spec.valid() || w.size() != spec.sizes.size() - 1 || b.size() != w.size()) {
        throw std::invalid_argument("parameter shapes inconsistent with layer spec");
    }
    for (std::size_t l = 0; l < w.size(); ++l) {
        if (w[l].rows() != spec.sizes[l + 1] || w[l].cols() != spec.sizes[l] ||
            b[l].size() != spec.sizes[l + 1]) {
            throw std::invalid_argument("parameter shapes inconsistent with layer spec");
        }
    }
    spec_ = std::move(spec);
    weights_ = std::move(w);
    biases_ = std::move(b);
}

double mse_loss(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
    if (pred.size() == 0) {
        throw std::invalid_argument("empty batch");
    }
    if (pred.size() != target.size()) {
        throw std::invalid_argument("batch size mismatch");
    }
    return (target - pred).squaredNorm() / static_cast<double>(pred.size());
}

}  // namespace usp
