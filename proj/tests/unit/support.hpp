#pragma once

#include <cmath>
#include <random>

#include "pvk/common.hpp"

namespace pvk::test {

inline Vec2 random_point(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng)};
}

inline double dist(const Vec2& a, const Vec2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace pvk::test
