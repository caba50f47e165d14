#include "usp/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace usp {

namespace {
constexpr Complexd kI{0.0, 1.0};
}

MatrixC single_qubit_hamiltonian(double j, double h) {
    MatrixC m(2, 2);
    m << Complexd(j, 0), Complexd(h, 0),
         Complexd(h, 0), Complexd(-j, 0);
    return m;
}

MatrixC two_qubit_hamiltonian(double j1, double j2, double h1, double h2, double j12) {
    MatrixC m = MatrixC::Zero(4, 4);
    m(0, 0) = j1 + j2;
    m(0, 1) = h2;
    m(0, 2) = h1;
    m(1, 0) = h2;
    m(1, 1) = j1 - j2;
    m(1, 3) = h1;
    m(2, 0) = h1;
    m(2, 2) = j2 - j1;
    m(2, 3) = h2;
    m(3, 1) = h1;
    m(3, 2) = h2;
    m(3, 3) = -j1 - j2 + 2.0 * j12;
    return 0.5 * m;  // hbar/2 prefactor with hbar = 1
}

MatrixC build_h1(const SingleQubitParams& p) {
    if (!(p.j >= 0.0) || !std::isfinite(p.j)) {
        throw std::invalid_argument("exchange coupling J must be non-negative and finite");
    }
    return single_qubit_hamiltonian(p.j, p.h);
}

MatrixC build_h2(const TwoQubitParams& p) {
    if (!(p.j1 > 0.0) || !(p.j2 > 0.0) || !std::isfinite(p.j1) || !std::isfinite(p.j2)) {
        throw std::invalid_argument("exchange couplings J1, J2 must be positive and finite");
    }
    return two_qubit_hamiltonian(p.j1, p.j2, p.h1, p.h2, p.j12());
}

MatrixC propagator_su2(double j, double h, double dt) {
    if (dt < 0.0) {
        throw std::invalid_argument("step duration must be non-negative");
    }
    MatrixC u(2, 2);
    const double omega = std::hypot(j, h);
    if (omega == 0.0) {
        u.setIdentity();
        return u;
    }
    const double c = std::cos(omega * dt);
    const double g = std::sin(omega * dt) / omega;
    u << Complexd(c, -g * j), Complexd(0.0, -g * h),
         Complexd(0.0, -g * h), Complexd(c, g * j);
    return u;
}

MatrixC propagator_su2(const SingleQubitParams& p, double dt) {
    if (!(p.j >= 0.0) || !std::isfinite(p.j)) {
        throw std::invalid_argument("exchange coupling J must be non-negative and finite");
    }
    return propagator_su2(p.j, p.h, dt);
}

MatrixC propagator_eig(const MatrixC& hamiltonian, double dt) {
    if (hamiltonian.rows() != hamiltonian.cols()) {
        throw std::invalid_argument("Hamiltonian must be square");
    }
    if (!is_hermitian(hamiltonian)) {
        throw std::invalid_argument("Hamiltonian must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<MatrixC> solver(hamiltonian);
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const MatrixC& v = solver.eigenvectors();
    Eigen::VectorXcd phases(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        phases(k) = std::exp(-kI * lambda(k) * dt);
    }
    return v * phases.asDiagonal() * v.adjoint();
}

StateVector evolve_step(const StateVector& s, const MatrixC& u) {
    if (u.cols() != s.size()) {
        throw std::invalid_argument("propagator/state dimension mismatch");
    }
    return u * s;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("states must have the same dimension");
    }
    return std::norm(a.dot(b));
}

BlochVector state_to_bloch(const StateVector& s) {
    if (s.size() != 2) {
        throw std::invalid_argument("Bloch coordinates require a single-qubit state");
    }
    const Complexd cross = std::conj(s(0)) * s(1);
    BlochVector b;
    b.x = 2.0 * cross.real();
    b.y = 2.0 * cross.imag();
    b.z = std::norm(s(0)) - std::norm(s(1));
    return b;
}

void check_state(const StateVector& s) {
    if (s.size() != 2 && s.size() != 4) {
        throw std::invalid_argument("state dimension must be 2 or 4");
    }
    if (std::abs(s.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("state must be unit-norm");
    }
}

bool is_hermitian(const MatrixC& m, double tol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double unitarity_defect(const MatrixC& u) {
    MatrixC d = u.adjoint() * u;
    d -= MatrixC::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

}  // namespace usp
