#include "curvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "curvflow/cg.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/kernels.hpp"

namespace curvflow {
namespace {

void require_size(const DiscreteManifold& man, std::span<const double> f, const char* what)
{
    if (f.size() != man.node_count())
        throw SizeMismatch(std::string(what) + " size does not match manifold");
}

void require_positive(std::span<const double> u)
{
    for (double x : u)
        if (!(x > 0.0))
            throw NonPositiveField("field must be strictly positive");
}

void require_params(double c, double p)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw InvalidArgument("exponent p must be > 1");
    if (!(c > 0.0) || !std::isfinite(c))
        throw InvalidArgument("coefficient c must be > 0");
}

// Scales u in place onto the unit L^{p+1} sphere; power is sum m u^{p+1}.
void project(const DiscreteManifold& man, NodeField& u, double p, double power)
{
    for (int pass = 0; pass < 2; ++pass) {
        const double scale = std::pow(power, -1.0 / (p + 1.0));
        for (auto& x : u)
            x *= scale;
        power = kernels::par::rayleigh_parts(man.mass(), man.mass(), u, p).power;
        if (std::abs(power - 1.0) <= 1e-15)
            break;
    }
}

// Double-double accumulator: value hi + lo with |lo| <= ulp(hi) / 2.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    static DoubleDouble from_sum(double a, double b)
    {
        const double s = a + b;
        const double bb = s - a;
        return {s, (a - (s - bb)) + (b - bb)};
    }

    DoubleDouble operator+(DoubleDouble o) const
    {
        const DoubleDouble s = from_sum(hi, o.hi);
        return from_sum(s.hi, s.lo + lo + o.lo);
    }

    DoubleDouble operator*(double b) const
    {
        const double p = hi * b;
        const double e = std::fma(hi, b, -p) + lo * b;
        return from_sum(p, e);
    }

    DoubleDouble operator*(DoubleDouble o) const
    {
        const double p = hi * o.hi;
        const double e = std::fma(hi, o.hi, -p) + (hi * o.lo + lo * o.hi);
        return from_sum(p, e);
    }
};

DoubleDouble dd_power(double x, double exponent)
{
    const double k = std::round(exponent);
    if (k == exponent && k >= 1.0 && k <= 16.0) {
        DoubleDouble out{x, 0.0};
        for (int i = 1; i < static_cast<int>(k); ++i)
            out = out * x;
        return out;
    }
    return {std::pow(x, exponent), 0.0};
}

}  // namespace

double conformal_coefficient(int n)
{
    if (n < 3)
        throw InvalidDimension("c_n = 4(n-1)/(n-2) needs n >= 3");
    return 4.0 * (n - 1) / (n - 2);
}

double critical_exponent(int n)
{
    if (n < 3)
        throw InvalidDimension("p = (n+2)/(n-2) needs n >= 3");
    return static_cast<double>(n + 2) / (n - 2);
}

std::string to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::Converged: return "Converged";
    case StopReason::MaxSteps: return "MaxSteps";
    case StopReason::TmaxReached: return "TmaxReached";
    case StopReason::PositivityFailure: return "PositivityFailure";
    }
    return "Unknown";
}

NodeField pseudo_scalar_curvature(const DiscreteManifold& man, std::span<const double> u,
                                  std::span<const double> psi, double c, double p)
{
    require_size(man, u, "u");
    require_size(man, psi, "psi");
    require_positive(u);
    NodeField su(u.size());
    kernels::par::spmv(man.stiffness(), u, su);
    NodeField R(u.size());
    kernels::par::field_stats(man.mass(), u, su, psi, c, p, 0.0, R);
    return R;
}

double rayleigh_r(const DiscreteManifold& man, std::span<const double> u,
                  std::span<const double> psi, double c, double p)
{
    require_size(man, u, "u");
    require_size(man, psi, "psi");
    const auto parts = kernels::par::rayleigh_parts(man.mass(), psi, u, p);
    if (parts.power == 0.0 || !std::isfinite(parts.power))
        throw ZeroDenominator("int u^{p+1} vanishes");
    return (c * dirichlet_energy(man, u) + parts.potential) / parts.power;
}

double constrained_rayleigh(const DiscreteManifold& man, std::span<const double> u,
                            std::span<const double> psi, double c, double p)
{
    require_size(man, u, "u");
    require_size(man, psi, "psi");
    const auto mass = man.mass();
    const auto& s = man.stiffness();
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto v = s.values();

    DoubleDouble grad, potential, power;
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            const std::size_t j = ci[k];
            if (j <= i || v[k] == 0.0)
                continue;
            const DoubleDouble d = DoubleDouble::from_sum(u[i], -u[j]);
            grad = grad + (d * d) * (-v[k]);
        }
        const DoubleDouble sq = DoubleDouble{u[i], 0.0} * u[i];
        potential = potential + sq * (mass[i] * psi[i]);
        power = power + dd_power(u[i], p + 1.0) * mass[i];
    }
    if (!(power.hi > 0.0) || !std::isfinite(power.hi))
        throw ZeroDenominator("int u^{p+1} vanishes");
    const DoubleDouble num = grad * c + potential;
    // E = num * P^{-2/(p+1)}; P is close to 1 on the constraint, so go through
    // log1p of P - 1 to keep its low part.
    const double delta = (power.hi - 1.0) + power.lo;
    const double eta = std::expm1(-2.0 / (p + 1.0) * std::log1p(delta));
    return num.hi + (num.lo + num.hi * eta);
}

NodeField normalize(const DiscreteManifold& man, std::span<const double> u, double p)
{
    require_size(man, u, "u");
    require_positive(u);
    NodeField out(u.begin(), u.end());
    project(man, out, p, kernels::par::rayleigh_parts(man.mass(), man.mass(), out, p).power);
    return out;
}

FlowState make_state(const DiscreteManifold& man, std::span<const double> psi,
                     std::span<const double> u0, FlowParams params)
{
    require_params(params.c, params.p);
    require_size(man, psi, "psi");
    FlowState s;
    s.u = normalize(man, u0, params.p);
    if (*std::min_element(s.u.begin(), s.u.end()) < 1e-10)
        throw IllConditionedInitialData("normalised initial data has min u < 1e-10");
    s.p = params.p;
    s.c = params.c;
    s.r = constrained_rayleigh(man, s.u, psi, s.c, s.p);
    return s;
}

FlowState step_explicit(const DiscreteManifold& man, std::span<const double> psi,
                        const FlowState& state, double dt)
{
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be positive");
    const std::size_t n = man.node_count();
    NodeField su(n);
    kernels::par::spmv(man.stiffness(), state.u, su);
    const double r = constrained_rayleigh(man, state.u, psi, state.c, state.p);

    FlowState next;
    next.u.resize(n);
    const auto st = kernels::par::explicit_update(man.mass(), state.u, su, psi, state.c,
                                                  state.p, r, dt, next.u);
    if (!(st.out_min > 0.0))
        throw StepRejectedPositivity("explicit step would make u non-positive");

    next.norm_err = st.power - 1.0;
    project(man, next.u, state.p, st.power);
    next.t = state.t + dt;
    next.step = state.step + 1;
    next.p = state.p;
    next.c = state.c;
    next.r = constrained_rayleigh(man, next.u, psi, next.c, next.p);
    return next;
}

FlowState step_imex(const DiscreteManifold& man, std::span<const double> psi,
                    const FlowState& state, double dt)
{
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be positive");
    const std::size_t n = man.node_count();
    const auto mass = man.mass();
    const double p = state.p;
    const double c = state.c;
    const double r = constrained_rayleigh(man, state.u, psi, c, p);
    const double tau = p * dt;

    NodeField w0(n);
    for (std::size_t i = 0; i < n; ++i)
        w0[i] = std::pow(state.u[i], p);

    // d(u^p)/dt = p u^{p-1} u_t = p (c lap u - psi u + r u^p), so with tau = p dt
    // G(w) = M(w - w0) + tau (c S u + M psi u) - tau r M w0, u = w^{1/p}.
    // Newton in w: J_w = M + tau (c S + M psi) D, D = du/dw = u / (p w). With
    // y = D dw the system becomes symmetric:
    //   (diag(m (p u^{p-1} + tau psi)) + tau c S) y = -G.
    NodeField w = w0;
    NodeField u(state.u.begin(), state.u.end());
    NodeField su(n), g(n), y(n);
    ShiftedStiffness jac{&man.stiffness(), tau * c, NodeField(n)};

    constexpr int kMaxNewton = 50;
    constexpr double kNewtonTol = 1e-12;
    bool converged = false;
    for (int it = 0; it < kMaxNewton && !converged; ++it) {
        kernels::par::spmv(man.stiffness(), u, su);
        double wmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = -(mass[i] * (w[i] - w0[i]) + tau * (c * su[i] + mass[i] * psi[i] * u[i]) -
                     tau * r * mass[i] * w0[i]);
            jac.shift[i] = mass[i] * (p * std::pow(u[i], p - 1.0) + tau * psi[i]);
            wmax = std::max(wmax, std::abs(w[i]));
            y[i] = 0.0;
        }
        CgResult cg;
        try {
            cg = solve_cg(jac, g, y, 1e-14, 10 * static_cast<int>(n) + 100);
        } catch (const InnerSolverFailure& e) {
            throw NewtonNoConvergence(std::string("imex Newton: ") + e.what());
        }
        if (!cg.converged && cg.relative_residual > 1e-10)
            throw NewtonNoConvergence("imex Newton: inner solve stalled");

        double step_max = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dw = p * std::pow(u[i], p - 1.0) * y[i];
            w[i] += dw;
            step_max = std::max(step_max, std::abs(dw));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!(w[i] > 0.0))
                throw StepRejectedPositivity("imex iterate left the positive cone");
            u[i] = std::pow(w[i], 1.0 / p);
        }
        converged = step_max <= kNewtonTol * std::max(1.0, wmax);
    }
    if (!converged)
        throw NewtonNoConvergence("imex Newton did not converge in 50 iterations");

    FlowState next;
    next.u = std::move(u);
    const double power = kernels::par::rayleigh_parts(mass, mass, next.u, p).power;
    next.norm_err = power - 1.0;
    project(man, next.u, p, power);
    next.t = state.t + dt;
    next.step = state.step + 1;
    next.p = p;
    next.c = c;
    next.r = constrained_rayleigh(man, next.u, psi, c, p);
    return next;
}

double adaptive_dt(const DiscreteManifold& man, const FlowState& state, double safety,
                   double dt_cap)
{
    const double umin = *std::min_element(state.u.begin(), state.u.end());
    const double dt = safety * std::pow(umin, state.p - 1.0) * man.min_mass() /
                      (state.c * man.max_stiffness_diagonal());
    return std::clamp(dt, 1e-12, std::max(dt_cap, 1e-12));
}

double sigma_shift(std::span<const double> R0)
{
    const double rmin = *std::min_element(R0.begin(), R0.end());
    return std::max(1.0 - rmin, 1.0);
}

double f_diagnostic(const DiscreteManifold& man, std::span<const double> u,
                    std::span<const double> psi, double c, double p)
{
    require_size(man, u, "u");
    require_size(man, psi, "psi");
    require_positive(u);
    const double r = rayleigh_r(man, u, psi, c, p);
    NodeField su(u.size());
    kernels::par::spmv(man.stiffness(), u, su);
    return kernels::par::field_stats(man.mass(), u, su, psi, c, p, r, {}).f;
}

TraceRecord diagnose(const DiscreteManifold& man, std::span<const double> psi,
                     const FlowState& state, double dt)
{
    NodeField su(state.u.size());
    kernels::par::spmv(man.stiffness(), state.u, su);
    const auto st =
        kernels::par::field_stats(man.mass(), state.u, su, psi, state.c, state.p, state.r, {});
    TraceRecord rec;
    rec.step = state.step;
    rec.t = state.t;
    rec.dt = dt;
    rec.r = state.r;
    rec.norm_err = state.norm_err;
    rec.u_min = st.u_min;
    rec.u_max = st.u_max;
    rec.f = st.f;
    rec.R_min = st.R_min;
    rec.R_max = st.R_max;
    rec.res_linf = st.res_linf;
    return rec;
}

std::optional<DecayFit> fit_decay(std::span<const TraceRecord> trace)
{
    if (trace.size() < 4)
        return std::nullopt;
    const auto tail = trace.subspan(trace.size() / 2);
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& rec : tail) {
        if (!(rec.r > 0.0))
            return std::nullopt;
        const double y = std::log(rec.r);
        st += rec.t;
        sy += y;
        stt += rec.t * rec.t;
        sty += rec.t * y;
    }
    const double m = static_cast<double>(tail.size());
    const double denom = m * stt - st * st;
    if (!(denom > 0.0))
        return std::nullopt;
    const double slope = (m * sty - st * sy) / denom;
    const double icept = (sy - slope * st) / m;
    const double ymean = sy / m;
    double ss_res = 0, ss_tot = 0;
    for (const auto& rec : tail) {
        const double y = std::log(rec.r);
        const double e = y - (icept + slope * rec.t);
        ss_res += e * e;
        ss_tot += (y - ymean) * (y - ymean);
    }
    DecayFit fit;
    fit.rate = -slope;
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

FlowResult run_flow(const DiscreteManifold& man, std::span<const double> psi,
                    std::span<const double> u0, FlowParams params, const FlowConfig& cfg)
{
    if (!(cfg.tol_f > 0.0) || !(cfg.tol_res > 0.0) || !(cfg.safety > 0.0) ||
        !(cfg.dt0 > 0.0) || cfg.trace_every < 1)
        throw InvalidArgument("flow tolerances, safety, dt0 and trace_every must be positive");
    require_size(man, u0, "u0");
    require_positive(u0);

    FlowResult result;
    FlowState state = make_state(man, psi, u0, params);
    result.max_constraint_err = std::abs(
        kernels::par::rayleigh_parts(man.mass(), man.mass(), state.u, state.p).power - 1.0);
    result.sigma = sigma_shift(pseudo_scalar_curvature(man, state.u, psi, state.c, state.p));

    double last_dt = 0.0;
    for (;;) {
        TraceRecord rec = diagnose(man, psi, state, last_dt);

        std::optional<StopReason> stop;
        if (rec.f <= cfg.tol_f && rec.res_linf <= cfg.tol_res)
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

        double dt = cfg.scheme == Scheme::Explicit
                        ? adaptive_dt(man, state, cfg.safety, cfg.dt0)
                        : cfg.dt0;
        dt = std::min(dt, cfg.t_max - state.t);

        std::optional<FlowState> next;
        for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings, dt *= 0.5) {
            try {
                next = cfg.scheme == Scheme::Explicit ? step_explicit(man, psi, state, dt)
                                                      : step_imex(man, psi, state, dt);
                break;
            } catch (const StepRejectedPositivity& e) {
                spdlog::debug("step {} rejected at dt={:.3e}: {}", state.step, dt, e.what());
            } catch (const NewtonNoConvergence& e) {
                spdlog::debug("step {} rejected at dt={:.3e}: {}", state.step, dt, e.what());
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
        const double power = kernels::par::rayleigh_parts(man.mass(), man.mass(), state.u, state.p).power;
        result.max_constraint_err = std::max(result.max_constraint_err, std::abs(power - 1.0));
    }

    result.r_infinity = state.r;
    result.final = std::move(state);

    const bool flat_potential =
        std::all_of(psi.begin(), psi.end(), [](double x) { return x == 0.0; });
    if (flat_potential) {
        if (auto fit = fit_decay(result.trace)) {
            result.decay_rate = fit->rate;
            result.decay_fit_r2 = fit->r2;
        }
    }
    spdlog::debug("flow stopped: {} after {} steps, t={:.6g}, r={:.17g}",
                  to_string(result.stop), result.final.step, result.final.t, result.r_infinity);
    return result;
}

}  // namespace curvflow
