#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "curvflow/manifold.hpp"

namespace testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline curvflow::DiscreteManifold circle(std::size_t n, double length = kTwoPi)
{
    const std::size_t counts[] = {n};
    const double lengths[] = {length};
    return curvflow::build_torus_grid(counts, lengths);
}

inline curvflow::DiscreteManifold torus2(std::size_t n1, std::size_t n2, double l1 = kTwoPi,
                                         double l2 = kTwoPi)
{
    const std::size_t counts[] = {n1, n2};
    const double lengths[] = {l1, l2};
    return curvflow::build_torus_grid(counts, lengths);
}

inline std::vector<double> sample(const curvflow::DiscreteManifold& man,
                                  const std::function<double(std::span<const double>)>& fn)
{
    std::vector<double> out(man.node_count());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = fn(man.coordinates(i));
    return out;
}

inline std::vector<double> constant(const curvflow::DiscreteManifold& man, double v)
{
    return std::vector<double>(man.node_count(), v);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v)
        x = dist(rng);
    return v;
}

}  // namespace testing
