#include "curvflow/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <spdlog/spdlog.h>

#include "curvflow/errors.hpp"
#include "curvflow/kernels.hpp"

namespace curvflow {
namespace {

void require_surface(const DiscreteManifold& man)
{
    if (man.dim() != 2)
        throw DimensionMismatch("the Gauss flow needs a 2-dimensional manifold");
}

void require_sizes(const DiscreteManifold& man, std::span<const double> u,
                   std::span<const double> psi)
{
    if (u.size() != man.node_count() || psi.size() != man.node_count())
        throw SizeMismatch("field size does not match manifold");
}

double area(const DiscreteManifold& man, std::span<const double> u)
{
    const auto mass = man.mass();
    double a = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        a += mass[i] * std::exp(2.0 * u[i]);
    return a;
}

}  // namespace

NodeField k_psi(const DiscreteManifold& man, std::span<const double> u,
                std::span<const double> psi)
{
    require_surface(man);
    require_sizes(man, u, psi);
    NodeField lap = laplacian_apply(man, u);
    NodeField k(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        k[i] = std::exp(-2.0 * u[i]) * (-lap[i] + psi[i]);
    return k;
}

double gauss_r(const DiscreteManifold& man, std::span<const double> u,
               std::span<const double> psi)
{
    require_surface(man);
    require_sizes(man, u, psi);
    return integrate(man, psi) / area(man, u);
}

GaussState step_gauss(const DiscreteManifold& man, std::span<const double> psi,
                      const GaussState& state, double dt)
{
    require_surface(man);
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be positive");
    const std::size_t n = man.node_count();
    const double r = gauss_r(man, state.u, psi);
    const NodeField lap = laplacian_apply(man, state.u);

    GaussState next;
    next.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::exp(2.0 * state.u[i]);
        const double w_next = w + 2.0 * dt * (lap[i] - psi[i] + r * w);
        if (!(w_next > 0.0))
            throw StepRejectedPositivity("area density would become non-positive");
        next.u[i] = 0.5 * std::log(w_next);
    }
    next.t = state.t + dt;
    next.step = state.step + 1;
    next.r = gauss_r(man, next.u, psi);
    return next;
}

double gauss_adaptive_dt(const DiscreteManifold& man, const GaussState& state, double safety,
                         double dt_cap)
{
    const double umin = *std::min_element(state.u.begin(), state.u.end());
    const double dt =
        safety * man.min_mass() * std::exp(2.0 * umin) / man.max_stiffness_diagonal();
    return std::clamp(dt, 1e-12, std::max(dt_cap, 1e-12));
}

TraceRecord diagnose_gauss(const DiscreteManifold& man, std::span<const double> psi,
                           const GaussState& state, double dt, double initial_area)
{
    const auto mass = man.mass();
    const NodeField lap = laplacian_apply(man, state.u);
    TraceRecord rec;
    rec.step = state.step;
    rec.t = state.t;
    rec.dt = dt;
    rec.r = state.r;
    rec.norm_err = area(man, state.u) / initial_area - 1.0;
    rec.u_min = std::numeric_limits<double>::infinity();
    rec.u_max = -rec.u_min;
    rec.R_min = rec.u_min;
    rec.R_max = rec.u_max;
    for (std::size_t i = 0; i < state.u.size(); ++i) {
        const double w = std::exp(2.0 * state.u[i]);
        const double k = (-lap[i] + psi[i]) / w;
        rec.f += mass[i] * (k - state.r) * (k - state.r) * w;
        rec.res_linf = std::max(rec.res_linf, std::abs(lap[i] - psi[i] + state.r * w));
        rec.u_min = std::min(rec.u_min, state.u[i]);
        rec.u_max = std::max(rec.u_max, state.u[i]);
        rec.R_min = std::min(rec.R_min, k);
        rec.R_max = std::max(rec.R_max, k);
    }
    return rec;
}

GaussResult run_gauss_flow(const DiscreteManifold& man, std::span<const double> psi,
                           std::span<const double> u0, const FlowConfig& cfg)
{
    require_surface(man);
    require_sizes(man, u0, psi);
    if (!(cfg.tol_f > 0.0) || !(cfg.safety > 0.0) || !(cfg.dt0 > 0.0) || cfg.trace_every < 1)
        throw InvalidArgument("flow tolerances, safety, dt0 and trace_every must be positive");
    for (double x : u0)
        if (!std::isfinite(x))
            throw InvalidArgument("initial log-factor must be finite");

    GaussResult result;
    GaussState state;
    state.u.assign(u0.begin(), u0.end());
    state.r = gauss_r(man, state.u, psi);
    result.initial_area = area(man, state.u);
    spdlog::debug("gauss flow: r uses int psi dv / int e^(2u) dv (area-conserving reading)");

    double last_dt = 0.0;
    for (;;) {
        TraceRecord rec = diagnose_gauss(man, psi, state, last_dt, result.initial_area);
        std::optional<StopReason> stop;
        if (rec.f <= cfg.tol_f)
            stop = StopReason::Converged;
        else if (state.step >= cfg.max_steps)
            stop = StopReason::MaxSteps;
        else if (state.t >= cfg.t_max * (1.0 - 1e-14))
            stop = StopReason::TmaxReached;

        if (stop || state.step % cfg.trace_every == 0)
            result.trace.push_back(rec);
        if (stop) {
            result.stop = *stop;
            break;
        }

        double dt = std::min(gauss_adaptive_dt(man, state, cfg.safety, cfg.dt0),
                             cfg.t_max - state.t);
        std::optional<GaussState> next;
        for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings, dt *= 0.5) {
            try {
                next = step_gauss(man, psi, state, dt);
                break;
            } catch (const StepRejectedPositivity&) {
            }
        }
        if (!next) {
            result.stop = StopReason::PositivityFailure;
            if (result.trace.empty() || result.trace.back().step != rec.step)
                result.trace.push_back(rec);
            break;
        }
        last_dt = dt;
        state = std::move(*next);
    }
    result.r_infinity = state.r;
    result.final = std::move(state);
    return result;
}

}  // namespace curvflow
