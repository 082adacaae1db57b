#pragma once

#include <span>
#include <vector>

#include "curvflow/manifold.hpp"

namespace curvflow {

struct NewtonResult {
    NodeField u;
    double r = 0.0;
    int iterations = 0;
    // |F|_inf before each iteration and at return.
    std::vector<double> residual_history;
};

// Solves -c lap u + psi u = r u^p with int u^{p+1} dv = 1 for (u, r) jointly by
// damped Newton on the bordered system
//   [ A   b ] [du]   [ -M G      ]
//   [ b^T 0 ] [dr] = [ h / (p+1) ],  A = cS + M(psi - p r u^{p-1}), b = -M u^p.
// The initial iterate is normalised and r starts at its Rayleigh value.
NewtonResult newton_constrained(const DiscreteManifold& man, std::span<const double> psi,
                                double c, double p, std::span<const double> u_init,
                                double tol = 1e-10, int max_iter = 50);

// max_i |-c (lap u)_i + psi_i u_i - r u_i^p|.
double residual_linf(const DiscreteManifold& man, std::span<const double> u,
                     std::span<const double> psi, double c, double p, double r);

}  // namespace curvflow
