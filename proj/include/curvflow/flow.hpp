#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvflow/manifold.hpp"

namespace curvflow {

// Coefficients of u_t = u^{1-p}(c lap u - psi u) + r u.
struct FlowParams {
    double c = 1.0;  // diffusion coefficient
    double p = 3.0;  // nonlinearity exponent, > 1
};

// 4(n-1)/(n-2), the conformal Laplacian coefficient; n >= 3.
double conformal_coefficient(int n);
// (n+2)/(n-2); n >= 3.
double critical_exponent(int n);

struct FlowState {
    NodeField u;            // positive conformal factor with unit L^{p+1} norm
    double t = 0.0;
    long step = 0;
    double p = 3.0;
    double c = 1.0;
    double r = 0.0;         // Rayleigh value of u
    double norm_err = 0.0;  // constraint error of the step that produced u, before projection
};

enum class Scheme { Explicit, Imex };

struct FlowConfig {
    Scheme scheme = Scheme::Explicit;
    double dt0 = 1e-2;  // step for imex, step cap for explicit
    double safety = 0.25;
    double tol_f = 1e-10;
    double tol_res = 1e-8;
    double t_max = 1e3;
    long max_steps = 2'000'000;
    int max_halvings = 40;
    int trace_every = 1;
    std::uint64_t seed = 1;
};

struct TraceRecord {
    long step = 0;
    double t = 0.0;
    double dt = 0.0;
    double r = 0.0;
    double norm_err = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double f = 0.0;
    double R_min = 0.0;
    double R_max = 0.0;
    double res_linf = 0.0;
};

enum class StopReason { Converged, MaxSteps, TmaxReached, PositivityFailure };
std::string to_string(StopReason reason);

struct FlowResult {
    FlowState final;
    std::vector<TraceRecord> trace;
    StopReason stop = StopReason::MaxSteps;
    double r_infinity = 0.0;
    std::optional<double> decay_rate;    // c in r <= C exp(-c t)
    std::optional<double> decay_fit_r2;  // coefficient of determination of that fit
    double sigma = 1.0;                  // curvature shift from the initial state
    double max_constraint_err = 0.0;     // max |int u^{p+1} - 1| over accepted states
};

// R = u^{-p}(-c lap u + psi u).
NodeField pseudo_scalar_curvature(const DiscreteManifold& man, std::span<const double> u,
                                  std::span<const double> psi, double c, double p);

// (c int|grad u|^2 + int psi u^2) / int u^{p+1}.
double rayleigh_r(const DiscreteManifold& man, std::span<const double> u,
                  std::span<const double> psi, double c, double p);

// E(u) = r(u / |u|_{L^{p+1}}), the scale-invariant Rayleigh value, accumulated in
// double-double arithmetic (exact powers when p + 1 is a small integer). Agrees
// with rayleigh_r on the unit constraint; this is the r cached in FlowState.
double constrained_rayleigh(const DiscreteManifold& man, std::span<const double> u,
                            std::span<const double> psi, double c, double p);

// u / |u|_{L^{p+1}}.
NodeField normalize(const DiscreteManifold& man, std::span<const double> u, double p);

// Normalised state at t = 0. Throws NonPositiveField / IllConditionedInitialData.
FlowState make_state(const DiscreteManifold& man, std::span<const double> psi,
                     std::span<const double> u0, FlowParams params);

// Forward Euler step followed by projection onto the unit constraint.
// Throws StepRejectedPositivity when some u_i would become non-positive.
FlowState step_explicit(const DiscreteManifold& man, std::span<const double> psi,
                        const FlowState& state, double dt);

// Semi-implicit step of the fast-diffusion form d(u^p)/dt = p (c lap u - psi u + r u^p)
// with r frozen at the step start, solved by Newton in w = u^p.
FlowState step_imex(const DiscreteManifold& man, std::span<const double> psi,
                    const FlowState& state, double dt);

// safety * min u^{p-1} * min mass / (c max S_ii), clamped to [1e-12, dt_cap].
double adaptive_dt(const DiscreteManifold& man, const FlowState& state, double safety,
                   double dt_cap);

// max(1 - min R0, 1).
double sigma_shift(std::span<const double> R0);

// int (R - r)^2 u^{p+1} dv.
double f_diagnostic(const DiscreteManifold& man, std::span<const double> u,
                    std::span<const double> psi, double c, double p);

// Diagnostics of one state, as recorded in the trace (step, t, dt, norm_err
// copied from the state).
TraceRecord diagnose(const DiscreteManifold& man, std::span<const double> psi,
                     const FlowState& state, double dt);

struct DecayFit {
    double rate = 0.0;
    double r2 = 0.0;
};
// Least squares of log r against t over the last half of the trace; empty
// when some r there is not positive.
std::optional<DecayFit> fit_decay(std::span<const TraceRecord> trace);

FlowResult run_flow(const DiscreteManifold& man, std::span<const double> psi,
                    std::span<const double> u0, FlowParams params, const FlowConfig& cfg);

}  // namespace curvflow
