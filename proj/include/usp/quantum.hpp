#pragma once

#include <Eigen/Dense>
#include <complex>

namespace usp {

using Complexd = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using MatrixC = Eigen::MatrixXcd;

// Single S-T0 qubit, basis {|0> = |S>, |1> = |T0>}.
// H = J sigma_z + h sigma_x with tunable exchange coupling J and fixed
// Zeeman spacing h (h = 1, hbar = 1 throughout).
struct SingleQubitParams {
    double j = 0.0;
    double h = 1.0;
};

// Two capacitively coupled S-T0 qubits, basis {|SS>, |ST0>, |T0S>, |T0T0>}.
// The interqubit coupling is tied to the exchange couplings: j12 = j1*j2/2.
struct TwoQubitParams {
    double j1 = 1.0;
    double j2 = 1.0;
    double h1 = 1.0;
    double h2 = 1.0;
    double j12() const { return j1 * j2 / 2.0; }
};

// Raw builders. No physical-range validation: noisy replay legitimately
// produces negative effective couplings.
MatrixC single_qubit_hamiltonian(double j, double h);
MatrixC two_qubit_hamiltonian(double j1, double j2, double h1, double h2, double j12);

// Validated builders for the clean control model.
// build_h1 rejects negative or non-finite J; build_h2 rejects J1 <= 0 or J2 <= 0.
MatrixC build_h1(const SingleQubitParams& p);
MatrixC build_h2(const TwoQubitParams& p);

// Closed-form exp(-i (j sz + h sx) dt). Valid for any real j, h; returns the
// identity for the degenerate j = h = 0 case.
MatrixC propagator_su2(double j, double h, double dt);
MatrixC propagator_su2(const SingleQubitParams& p, double dt);

// exp(-i H dt) through the spectral decomposition of a Hermitian H.
// Serves the 4x4 case and doubles as an independent oracle for the 2x2
// closed form. Rejects non-Hermitian input.
MatrixC propagator_eig(const MatrixC& hamiltonian, double dt);

// One piecewise-constant step: returns U * s. Rejects dimension mismatch.
StateVector evolve_step(const StateVector& s, const MatrixC& u);

// |<a|b>|^2, invariant under global phase of either argument.
double fidelity(const StateVector& a, const StateVector& b);

struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Pauli expectation values (<sx>, <sy>, <sz>) of a single-qubit state.
BlochVector state_to_bloch(const StateVector& s);

// Boundary validation: dimension 2 or 4, unit norm within 1e-9.
void check_state(const StateVector& s);

bool is_hermitian(const MatrixC& m, double tol = 1e-10);
double unitarity_defect(const MatrixC& u);

}  // namespace usp
