#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "usp/quantum.hpp"

namespace usp {

// A point on the Bloch sphere: theta in [0, pi], phi in [0, 2*pi).
struct BlochPoint {
    double theta = 0.0;
    double phi = 0.0;
};

// A point on the four-dimensional unit hypersphere plus one unit-modulus
// phase factor per amplitude. phase_index k encodes the factor i^k from
// {1, i, -1, -i}.
struct HyperspherePoint {
    std::array<double, 3> thetas{};
    std::array<int, 4> phase_indices{};
};

enum class SetRole { train, test };

struct SingleTaskSet {
    std::vector<BlochPoint> points;
    SetRole role = SetRole::train;
};

struct TwoQubitTaskSet {
    std::vector<HyperspherePoint> points;
    SetRole role = SetRole::train;
};

// 5 polar x 10 azimuthal values with the two poles deduplicated: 32 points.
SingleTaskSet single_qubit_train_grid();

// 2 polar values inserted per training-theta interval (8 new thetas) crossed
// with 4 azimuthal values inserted per training-phi interval (40 new phis):
// 320 points, disjoint from the training grid in both coordinates.
SingleTaskSet single_qubit_test_grid();

// theta_i in {pi/8, pi/4, 3pi/8} (27 combinations) crossed with independent
// per-amplitude phase factors from {1, i, -1, -i} (256 combinations): 6912
// unit-norm states, enumerated in lexicographic order.
std::vector<HyperspherePoint> two_qubit_point_set();

// k distinct indices from [0, n), uniformly without replacement, sorted
// ascending. Deterministic per seed.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

// Uniform random split without replacement; both halves keep the original
// enumeration order. Deterministic per seed.
std::pair<TwoQubitTaskSet, TwoQubitTaskSet> split_train_test(
    const std::vector<HyperspherePoint>& points, std::size_t n_train, std::uint64_t seed);

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
StateVector point_to_state(const BlochPoint& p);

// a_j = b_j * c_j with c_j the hypersphere coordinates and b_j = i^{k_j}
StateVector point_to_state(const HyperspherePoint& p);

}  // namespace usp
