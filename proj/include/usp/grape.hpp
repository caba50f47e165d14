#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "usp/config.hpp"
#include "usp/environment.hpp"

namespace usp {

// A continuous piecewise-constant pulse sequence: one row per control
// channel (1 for single-qubit J, 2 for the two-qubit (J1, J2) pair), one
// column per slice.
struct GrapeEval {
    double fidelity = 0.0;
    Eigen::MatrixXd gradient;  // same shape as the sequence
};

// Final-state fidelity |<target| U_N ... U_1 |initial>|^2 of the sequence.
double grape_fidelity(const Eigen::MatrixXd& seq, const PreparationTask& task, double dt);

// Fidelity plus its exact gradient with respect to every slice value. The
// 2x2 slice propagator is differentiated in closed form; the 4x4 one through
// the spectral decomposition (Daleckii-Krein divided differences).
GrapeEval grape_fidelity_and_gradient(const Eigen::MatrixXd& seq, const PreparationTask& task,
                                      double dt);

struct GrapeRun {
    Eigen::MatrixXd sequence;
    double continuous_fidelity = 0.0;
    int iterations = 0;
    std::vector<double> fidelity_log;  // fidelity after each accepted step
};

// Projected gradient ascent from a random bounded initialization, with a
// backtracking line search (accepted steps never decrease fidelity) and a
// projected-gradient-norm stopping rule. Best result over `restarts`
// independent starts.
GrapeRun grape_optimize(const PreparationTask& task, const GrapeSettings& settings, int slices,
                        double lower, double upper, double dt, std::uint64_t seed);

// Snaps every slice to the nearest allowed value (ties to the smaller one)
// and returns the action indices.
std::vector<int> discretize_to_allowed(const Eigen::MatrixXd& seq, const ActionAlphabet& alphabet);

// Nearest-value snap for one channel value.
double snap_to_alphabet(double value, const std::vector<double>& sorted_values);

}  // namespace usp
