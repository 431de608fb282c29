#pragma once

#include <random>
#include <vector>

#include "gaussmiss/sphere.hpp"

namespace gaussmiss::test_support {

// Gaussian directions, rejecting any point closer than `separation` to the
// antipode of an earlier one.
inline std::vector<UnitVector> random_obstacles(std::mt19937_64& rng, int n, double separation) {
    std::normal_distribution<double> nd;
    std::vector<UnitVector> out;
    while (static_cast<int>(out.size()) < n) {
        const UnitVector c(nd(rng), nd(rng), nd(rng));
        bool ok = true;
        for (const auto& x : out) ok = ok && angular_distance(c, -x) >= separation;
        if (ok) out.push_back(c);
    }
    return out;
}

}  // namespace gaussmiss::test_support
