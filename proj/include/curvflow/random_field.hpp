#pragma once

#include <cstdint>

#include "curvflow/manifold.hpp"

namespace curvflow {

struct LogNormalOptions {
    double log_std = 0.5;                // standard deviation of log u
    double correlation_fraction = 0.125; // correlation length / domain diameter
    int features = 64;                   // random Fourier features
};

// u = exp(g) with g a mean-zero Gaussian field of squared-exponential
// covariance, sampled by random Fourier features (frequencies snapped to the
// lattice of periodic coordinates). Deterministic in seed.
NodeField log_normal_field(const DiscreteManifold& man, std::uint64_t seed,
                           const LogNormalOptions& opts = {});

}  // namespace curvflow
