#include "curvflow/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvflow {
namespace {

bool consecutive(const TraceRecord& a, const TraceRecord& b)
{
    return b.step == a.step + 1;
}

}  // namespace

ConservationCheck check_conservation(std::span<const TraceRecord> trace)
{
    ConservationCheck out;
    for (std::size_t k = 1; k < trace.size(); ++k) {
        if (!consecutive(trace[k - 1], trace[k]))
            continue;
        const double dt = trace[k].dt;
        const double a = 1.0 + std::abs(trace[k - 1].r);
        const double bound = 10.0 * dt * dt * a * a;
        const double err = std::abs(trace[k].norm_err);
        ++out.steps;
        if (err <= bound)
            ++out.within;
        out.worst_ratio = std::max(out.worst_ratio, err / bound);
    }
    return out;
}

MonotoneCheck check_monotone(std::span<const TraceRecord> trace, double allowance_coeff)
{
    MonotoneCheck out;
    for (std::size_t k = 1; k < trace.size(); ++k) {
        if (!consecutive(trace[k - 1], trace[k]))
            continue;
        ++out.pairs;
        const double inc = trace[k].r - trace[k - 1].r;
        if (inc <= 0.0)
            continue;
        ++out.increases;
        out.max_increase = std::max(out.max_increase, inc);
        const double dt = trace[k].dt;
        if (inc > allowance_coeff * dt * dt * std::abs(trace[k - 1].r))
            ++out.violations;
    }
    return out;
}

DissipationCheck check_dissipation(std::span<const TraceRecord> trace, double f_floor)
{
    DissipationCheck out;
    for (std::size_t k = 1; k + 1 < trace.size(); ++k) {
        const auto& a = trace[k - 1];
        const auto& b = trace[k];
        const auto& c = trace[k + 1];
        if (!consecutive(a, b) || !consecutive(b, c) || !(b.f > f_floor))
            continue;
        const double drdt = (c.r - a.r) / (c.t - a.t);
        ++out.points;
        out.max_rel_err = std::max(out.max_rel_err, std::abs(drdt + 2.0 * b.f) / (2.0 * b.f));
    }
    return out;
}

MaxPrincipleCheck check_max_principle(std::span<const TraceRecord> trace, double sigma)
{
    MaxPrincipleCheck out;
    if (trace.empty())
        return out;
    out.initial_min = trace.front().R_min;
    out.tol = 1e-4 * (1.0 + std::abs(out.initial_min));
    const double lower = std::min(out.initial_min, 0.0) - out.tol;
    out.worst_lower = std::numeric_limits<double>::infinity();
    out.worst_sigma = out.worst_lower;
    for (const auto& rec : trace) {
        out.worst_lower = std::min(out.worst_lower, rec.R_min - lower);
        out.worst_sigma = std::min(out.worst_sigma, rec.R_min + sigma - (1.0 - out.tol));
    }
    return out;
}

HarnackCheck check_harnack(std::span<const TraceRecord> trace, double p, double eps)
{
    HarnackCheck out;
    if (trace.empty())
        return out;
    out.worst_upper = -std::numeric_limits<double>::infinity();
    out.worst_lower = out.worst_upper;
    const double log_m0 = p * std::log(trace.front().u_min);
    const double log_M0 = p * std::log(trace.front().u_max);
    const double slack = std::log1p(eps);
    double integral = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (k > 0)
            integral += 0.5 * (trace[k].r + trace[k - 1].r) * (trace[k].t - trace[k - 1].t);
        const double upper = p * std::log(trace[k].u_max) - log_M0;
        const double lower = p * std::log(trace[k].u_min) - log_m0;
        out.worst_upper = std::max(out.worst_upper, upper - integral - slack);
        out.worst_lower = std::max(out.worst_lower, integral + slack - lower - 2.0 * slack);
    }
    return out;
}

SignFlip find_sign_flip(std::span<const TraceRecord> trace)
{
    SignFlip out;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (trace[k].r < 0.0) {
            out.first_negative = k;
            out.stays_negative = std::all_of(trace.begin() + static_cast<std::ptrdiff_t>(k),
                                             trace.end(),
                                             [](const TraceRecord& r) { return r.r < 0.0; });
            break;
        }
    }
    return out;
}

double min_r_gap(std::span<const TraceRecord> trace, double lambda1)
{
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& rec : trace)
        gap = std::min(gap, rec.r - lambda1);
    return gap;
}

}  // namespace curvflow
