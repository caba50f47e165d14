#include "usp/task_sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "usp/rng.hpp"

namespace usp {

namespace {

const std::array<double, 5> kTrainThetas = {0.0, M_PI / 4, M_PI / 2, 3 * M_PI / 4, M_PI};

std::vector<double> train_phis() {
    std::vector<double> phis(10);
    for (int k = 0; k < 10; ++k) phis[k] = k * M_PI / 5.0;
    return phis;
}

}  // namespace

SingleTaskSet single_qubit_train_grid() {
    SingleTaskSet set;
    set.role = SetRole::train;
    set.points.push_back({0.0, 0.0});  // north pole, one point
    const auto phis = train_phis();
    for (std::size_t t = 1; t + 1 < kTrainThetas.size(); ++t) {
        for (double phi : phis) {
            set.points.push_back({kTrainThetas[t], phi});
        }
    }
    set.points.push_back({M_PI, 0.0});  // south pole, one point
    return set;
}

SingleTaskSet single_qubit_test_grid() {
    SingleTaskSet set;
    set.role = SetRole::test;

    // 2 points per theta interval, at the interior thirds
    std::vector<double> thetas;
    for (std::size_t t = 0; t + 1 < kTrainThetas.size(); ++t) {
        const double a = kTrainThetas[t];
        const double w = kTrainThetas[t + 1] - a;
        thetas.push_back(a + w / 3.0);
        thetas.push_back(a + 2.0 * w / 3.0);
    }

    // 4 points per phi interval (wrapping at 2*pi), at the interior fifths
    std::vector<double> phis;
    const auto base = train_phis();
    for (std::size_t k = 0; k < base.size(); ++k) {
        const double a = base[k];
        const double w = M_PI / 5.0;  // uniform interval width, incl. the wrap to 2*pi
        for (int j = 1; j <= 4; ++j) {
            phis.push_back(a + j * w / 5.0);
        }
    }

    for (double theta : thetas) {
        for (double phi : phis) {
            set.points.push_back({theta, phi});
        }
    }
    return set;
}

std::vector<HyperspherePoint> two_qubit_point_set() {
    const std::array<double, 3> angles = {M_PI / 8, M_PI / 4, 3 * M_PI / 8};
    std::vector<HyperspherePoint> points;
    points.reserve(27 * 256);
    for (double t1 : angles) {
        for (double t2 : angles) {
            for (double t3 : angles) {
                for (int b1 = 0; b1 < 4; ++b1) {
                    for (int b2 = 0; b2 < 4; ++b2) {
                        for (int b3 = 0; b3 < 4; ++b3) {
                            for (int b4 = 0; b4 < 4; ++b4) {
                                points.push_back({{t1, t2, t3}, {b1, b2, b3, b4}});
                            }
                        }
                    }
                }
            }
        }
    }
    return points;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
    if (k > n) throw std::invalid_argument("sample size exceeds population");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::size_t> chosen(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::pair<TwoQubitTaskSet, TwoQubitTaskSet> split_train_test(
    const std::vector<HyperspherePoint>& points, std::size_t n_train, std::uint64_t seed) {
    if (n_train > points.size()) {
        throw std::invalid_argument("training count exceeds point set size");
    }
    const std::vector<std::size_t> chosen = sample_without_replacement(points.size(), n_train, seed);

    TwoQubitTaskSet train{.points = {}, .role = SetRole::train};
    TwoQubitTaskSet test{.points = {}, .role = SetRole::test};
    std::size_t next = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (next < chosen.size() && chosen[next] == i) {
            train.points.push_back(points[i]);
            ++next;
        } else {
            test.points.push_back(points[i]);
        }
    }
    return {std::move(train), std::move(test)};
}

StateVector point_to_state(const BlochPoint& p) {
    if (p.theta < 0.0 || p.theta > M_PI + 1e-12) {
        throw std::invalid_argument("theta must lie in [0, pi]");
    }
    if (p.phi < 0.0 || p.phi >= 2.0 * M_PI) {
        throw std::invalid_argument("phi must lie in [0, 2*pi)");
    }
    StateVector s(2);
    s(0) = Complexd(std::cos(p.theta / 2.0), 0.0);
    s(1) = std::exp(Complexd(0.0, p.phi)) * std::sin(p.theta / 2.0);
    return s;
}

StateVector point_to_state(const HyperspherePoint& p) {
    static const std::array<Complexd, 4> kPhases = {
        Complexd(1, 0), Complexd(0, 1), Complexd(-1, 0), Complexd(0, -1)};
    for (double t : p.thetas) {
        if (t < 0.0 || t > M_PI) throw std::invalid_argument("hypersphere angle out of range");
    }
    const double c1 = std::cos(p.thetas[0]);
    const double c2 = std::sin(p.thetas[0]) * std::cos(p.thetas[1]);
    const double c3 = std::sin(p.thetas[0]) * std::sin(p.thetas[1]) * std::cos(p.thetas[2]);
    const double c4 = std::sin(p.thetas[0]) * std::sin(p.thetas[1]) * std::sin(p.thetas[2]);
    StateVector s(4);
    const std::array<double, 4> c = {c1, c2, c3, c4};
    for (int j = 0; j < 4; ++j) {
        const int k = p.phase_indices[static_cast<std::size_t>(j)];
        if (k < 0 || k > 3) throw std::invalid_argument("phase index out of range");
        s(j) = kPhases[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(j)];
    }
    return s;
}

}  // namespace usp
