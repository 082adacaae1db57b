#pragma once

#include <span>
#include <vector>

#include "curvflow/flow.hpp"
#include "curvflow/manifold.hpp"

namespace curvflow {

// Log-conformal factor of g(t) = e^{2u} g on a surface.
struct GaussState {
    NodeField u;
    double t = 0.0;
    long step = 0;
    double r = 0.0;
};

// Trace columns are reused: R_min/R_max hold K_psi extrema, f is
// int (K_psi - r)^2 e^{2u} dv, norm_err is the relative drift of the evolving
// area int e^{2u} dv, res_linf is max |lap u - psi + r e^{2u}|.
struct GaussResult {
    GaussState final;
    std::vector<TraceRecord> trace;
    StopReason stop = StopReason::MaxSteps;
    double r_infinity = 0.0;
    double initial_area = 0.0;
};

// K_psi = e^{-2u}(-lap u + psi).
NodeField k_psi(const DiscreteManifold& man, std::span<const double> u,
                std::span<const double> psi);

// int psi dv / int e^{2u} dv: the curvature integral taken against the evolving
// area element, for which int e^{2u} dv is conserved.
double gauss_r(const DiscreteManifold& man, std::span<const double> u,
               std::span<const double> psi);

// Forward Euler on w = e^{2u}: w+ = w + 2 dt (lap u - psi + r w). Throws
// StepRejectedPositivity when some w+ <= 0.
GaussState step_gauss(const DiscreteManifold& man, std::span<const double> psi,
                      const GaussState& state, double dt);

// safety * min mass * e^{2 min u} / max S_ii, clamped to [1e-12, dt_cap].
double gauss_adaptive_dt(const DiscreteManifold& man, const GaussState& state, double safety,
                         double dt_cap);

TraceRecord diagnose_gauss(const DiscreteManifold& man, std::span<const double> psi,
                           const GaussState& state, double dt, double initial_area);

// Stops when f <= tol_f; tol_res is not used.
GaussResult run_gauss_flow(const DiscreteManifold& man, std::span<const double> psi,
                           std::span<const double> u0, const FlowConfig& cfg);

}  // namespace curvflow
