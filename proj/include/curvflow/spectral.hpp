#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/manifold.hpp"

namespace curvflow {

struct EigenResult {
    double lambda1 = 0.0;
    NodeField eigenfunction;  // positive, int u1^2 dv = 1
    int iterations = 0;
    double residual = 0.0;    // |M^{-1}(cS + M psi) u1 - lambda1 u1|_inf / |u1|_inf
};

// Smallest eigenpair of (c S + M psi) v = lambda M v, i.e. of -c lap + psi, by
// shifted inverse iteration with Jacobi-preconditioned CG inner solves.
EigenResult lambda1(const DiscreteManifold& man, std::span<const double> psi, double c,
                    double tol = 1e-10, int max_iter = 5000);

// (c int|grad u|^2 + int psi u^2) / (int |u|^{p+1})^{2/(p+1)}.
double energy_E(const DiscreteManifold& man, std::span<const double> u,
                std::span<const double> psi, double c, double p);

struct StartOutcome {
    double r_final = 0.0;
    double energy = 0.0;
    StopReason stop = StopReason::MaxSteps;
};

struct YEstimate {
    double upper = 0.0;  // min over starts of the final energy: an upper bound on Y_psi
    std::vector<StartOutcome> starts;
};

// Multistart flow minimisation of E from the given positive fields. Starts run
// concurrently; the result does not depend on the execution order.
YEstimate estimate_Y_from_starts(const DiscreteManifold& man, std::span<const double> psi,
                                 FlowParams params, const std::vector<NodeField>& starts,
                                 const FlowConfig& cfg);

// Starts are log-normal fields seeded with seed + index.
YEstimate estimate_Y(const DiscreteManifold& man, std::span<const double> psi,
                     FlowParams params, int n_starts, std::uint64_t seed,
                     const FlowConfig& cfg = {});

// n(n-1) |S^n|^{2/n}.
double y_sphere_constant(int n);

// V^{(p-1)/(p+1)}: the Hoelder factor in int u^2 <= V^{(p-1)/(p+1)} |u|_{p+1}^2.
double holder_volume_factor(const DiscreteManifold& man, double p);

// Y <= V^{(p-1)/(p+1)} lambda1 when lambda1 >= 0, Y >= V^{(p-1)/(p+1)} lambda1
// otherwise. `slack` is the admitted violation.
bool volume_inequality_holds(double y_upper, double lambda1, double volume_factor,
                             double slack = 1e-8);

}  // namespace curvflow
