#include "usp/grape.hpp"

#include <cmath>
#include <stdexcept>

#include "usp/rng.hpp"

namespace usp {

namespace {

constexpr Complexd kI{0.0, 1.0};

int channels_for(SystemKind system) {
    return system == SystemKind::single_qubit ? 1 : 2;
}

void check_sequence(const Eigen::MatrixXd& seq, const PreparationTask& task) {
    if (seq.rows() != channels_for(task.system)) {
        throw std::invalid_argument("pulse sequence channel count does not match the system");
    }
}

MatrixC slice_propagator(const Eigen::MatrixXd& seq, Eigen::Index k, SystemKind system,
                         double dt) {
    if (system == SystemKind::single_qubit) {
        return propagator_su2(seq(0, k), 1.0, dt);
    }
    const double j1 = seq(0, k), j2 = seq(1, k);
    return propagator_eig(two_qubit_hamiltonian(j1, j2, 1.0, 1.0, j1 * j2 / 2.0), dt);
}

// d/dJ of the closed-form 2x2 propagator exp(-i (J sz + h sx) dt).
MatrixC su2_derivative(double j, double h, double dt) {
    const double omega = std::hypot(j, h);
    const double s = std::sin(omega * dt);
    const double c = std::cos(omega * dt);
    const double g = s / omega;
    const double dc = -s * dt * j / omega;
    const double dg = j / (omega * omega) * (c * dt - g);
    MatrixC du(2, 2);
    du(0, 0) = Complexd(dc, -(dg * j + g));
    du(0, 1) = Complexd(0.0, -dg * h);
    du(1, 0) = Complexd(0.0, -dg * h);
    du(1, 1) = Complexd(dc, dg * j + g);
    return du;
}

// Directional derivative of exp(-i H dt) along A for Hermitian H, via the
// divided-difference formula in the eigenbasis.
MatrixC exp_derivative(const Eigen::SelfAdjointEigenSolver<MatrixC>& es, const MatrixC& a,
                       double dt) {
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const MatrixC& v = es.eigenvectors();
    const Eigen::Index n = lambda.size();
    MatrixC m = v.adjoint() * a * v;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
            const double diff = lambda(k) - lambda(l);
            Complexd phi;
            if (std::abs(diff) > 1e-7) {
                phi = (std::exp(-kI * lambda(k) * dt) - std::exp(-kI * lambda(l) * dt)) / diff;
            } else {
                phi = -kI * dt * std::exp(-kI * (0.5 * (lambda(k) + lambda(l))) * dt);
            }
            m(k, l) *= phi;
        }
    }
    return v * m * v.adjoint();
}

}  // namespace

double grape_fidelity(const Eigen::MatrixXd& seq, const PreparationTask& task, double dt) {
    check_sequence(seq, task);
    StateVector psi = task.initial;
    for (Eigen::Index k = 0; k < seq.cols(); ++k) {
        psi = slice_propagator(seq, k, task.system, dt) * psi;
    }
    return std::norm(task.target.dot(psi));
}

GrapeEval grape_fidelity_and_gradient(const Eigen::MatrixXd& seq, const PreparationTask& task,
                                      double dt) {
    check_sequence(seq, task);
    const Eigen::Index n = seq.cols();
    GrapeEval eval;
    eval.gradient = Eigen::MatrixXd::Zero(seq.rows(), n);
    if (n == 0) {
        eval.fidelity = fidelity(task.initial, task.target);
        return eval;
    }

    std::vector<MatrixC> props(static_cast<std::size_t>(n));
    std::vector<Eigen::SelfAdjointEigenSolver<MatrixC>> eigs;
    const bool two = task.system == SystemKind::two_qubit;
    if (two) eigs.resize(static_cast<std::size_t>(n));

    // forward pass: psis[k] = U_k ... U_1 |initial>
    std::vector<StateVector> psis(static_cast<std::size_t>(n) + 1);
    psis[0] = task.initial;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (two) {
            const double j1 = seq(0, k), j2 = seq(1, k);
            auto& es = eigs[static_cast<std::size_t>(k)];
            es.compute(two_qubit_hamiltonian(j1, j2, 1.0, 1.0, j1 * j2 / 2.0));
            Eigen::VectorXcd phases(es.eigenvalues().size());
            for (Eigen::Index i = 0; i < phases.size(); ++i) {
                phases(i) = std::exp(-kI * es.eigenvalues()(i) * dt);
            }
            props[static_cast<std::size_t>(k)] =
                es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        } else {
            props[static_cast<std::size_t>(k)] = propagator_su2(seq(0, k), 1.0, dt);
        }
        psis[static_cast<std::size_t>(k) + 1] =
            props[static_cast<std::size_t>(k)] * psis[static_cast<std::size_t>(k)];
    }

    // backward pass: chis[k] = (U_N ... U_{k+1})^dagger |target>
    std::vector<StateVector> chis(static_cast<std::size_t>(n) + 1);
    chis[static_cast<std::size_t>(n)] = task.target;
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        chis[static_cast<std::size_t>(k)] =
            props[static_cast<std::size_t>(k)].adjoint() * chis[static_cast<std::size_t>(k) + 1];
    }

    const Complexd overlap = task.target.dot(psis[static_cast<std::size_t>(n)]);
    eval.fidelity = std::norm(overlap);

    for (Eigen::Index k = 0; k < n; ++k) {
        if (two) {
            const double j1 = seq(0, k), j2 = seq(1, k);
            // dH/dJ1 and dH/dJ2 with J12 = J1*J2/2 folded in
            Eigen::Vector4d d1, d2;
            d1 << 1.0, 1.0, -1.0, -1.0 + j2;
            d2 << 1.0, -1.0, 1.0, -1.0 + j1;
            for (int c = 0; c < 2; ++c) {
                MatrixC a = MatrixC::Zero(4, 4);
                a.diagonal() = (0.5 * (c == 0 ? d1 : d2)).cast<Complexd>();
                const MatrixC du = exp_derivative(eigs[static_cast<std::size_t>(k)], a, dt);
                const Complexd dz = chis[static_cast<std::size_t>(k) + 1].dot(
                    du * psis[static_cast<std::size_t>(k)]);
                eval.gradient(c, k) = 2.0 * (std::conj(overlap) * dz).real();
            }
        } else {
            const MatrixC du = su2_derivative(seq(0, k), 1.0, dt);
            const Complexd dz =
                chis[static_cast<std::size_t>(k) + 1].dot(du * psis[static_cast<std::size_t>(k)]);
            eval.gradient(0, k) = 2.0 * (std::conj(overlap) * dz).real();
        }
    }
    return eval;
}

GrapeRun grape_optimize(const PreparationTask& task, const GrapeSettings& settings, int slices,
                        double lower, double upper, double dt, std::uint64_t seed) {
    if (slices < 0) throw std::invalid_argument("slice count must be >= 0");
    if (upper < lower) throw std::invalid_argument("invalid pulse bounds");
    const int channels = channels_for(task.system);

    const auto clamp_seq = [&](Eigen::MatrixXd& m) {
        m = m.cwiseMax(lower).cwiseMin(upper);
    };

    GrapeRun best;
    bool have_best = false;
    for (int restart = 0; restart < settings.restarts; ++restart) {
        Rng rng(derive_seed(seed, {seed_tags::grape, static_cast<std::uint64_t>(restart)}));
        Eigen::MatrixXd x(channels, slices);
        for (int c = 0; c < channels; ++c) {
            for (int k = 0; k < slices; ++k) {
                x(c, k) = rng.uniform(lower, upper);
            }
        }

        GrapeRun run;
        GrapeEval eval = grape_fidelity_and_gradient(x, task, dt);
        run.fidelity_log.push_back(eval.fidelity);
        double step = settings.step_size;
        while (run.iterations < settings.max_iterations && slices > 0) {
            ++run.iterations;

            // projected gradient: drop components pushing against an active bound
            Eigen::MatrixXd pg = eval.gradient;
            for (int c = 0; c < channels; ++c) {
                for (int k = 0; k < slices; ++k) {
                    if ((x(c, k) <= lower && pg(c, k) < 0.0) ||
                        (x(c, k) >= upper && pg(c, k) > 0.0)) {
                        pg(c, k) = 0.0;
                    }
                }
            }
            if (pg.cwiseAbs().maxCoeff() < settings.tolerance) break;
            if (eval.fidelity >= 1.0 - 1e-12) break;

            bool accepted = false;
            double local = step;
            while (local > 1e-12) {
                Eigen::MatrixXd xt = x + local * eval.gradient;
                clamp_seq(xt);
                const double ft = grape_fidelity(xt, task, dt);
                if (ft > eval.fidelity) {
                    x = std::move(xt);
                    eval = grape_fidelity_and_gradient(x, task, dt);
                    run.fidelity_log.push_back(eval.fidelity);
                    accepted = true;
                    break;
                }
                local *= 0.5;
            }
            if (!accepted) break;
            step = std::min(local * 2.0, 16.0 * settings.step_size);
        }
        run.sequence = std::move(x);
        run.continuous_fidelity = eval.fidelity;
        if (!have_best || run.continuous_fidelity > best.continuous_fidelity) {
            best = std::move(run);
            have_best = true;
        }
    }
    return best;
}

double snap_to_alphabet(double value, const std::vector<double>& sorted_values) {
    if (sorted_values.empty()) throw std::invalid_argument("empty pulse alphabet");
    double best = sorted_values.front();
    double best_dist = std::abs(value - best);
    for (double v : sorted_values) {
        const double dist = std::abs(value - v);
        if (dist < best_dist) {  // strict: ties keep the smaller value
            best = v;
            best_dist = dist;
        }
    }
    return best;
}

std::vector<int> discretize_to_allowed(const Eigen::MatrixXd& seq, const ActionAlphabet& alphabet) {
    const int n = static_cast<int>(alphabet.values.size());
    const auto value_index = [&](double v) {
        const double snapped = snap_to_alphabet(v, alphabet.values);
        for (int i = 0; i < n; ++i) {
            if (alphabet.values[static_cast<std::size_t>(i)] == snapped) return i;
        }
        return 0;  // unreachable
    };

    std::vector<int> actions;
    actions.reserve(static_cast<std::size_t>(seq.cols()));
    for (Eigen::Index k = 0; k < seq.cols(); ++k) {
        if (alphabet.system == SystemKind::single_qubit) {
            if (seq.rows() != 1) throw std::invalid_argument("expected one channel");
            actions.push_back(value_index(seq(0, k)));
        } else {
            if (seq.rows() != 2) throw std::invalid_argument("expected two channels");
            actions.push_back(n * value_index(seq(0, k)) + value_index(seq(1, k)));
        }
    }
    return actions;
}

}  // namespace usp
