#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "curvflow/flow.hpp"

namespace curvflow {

// Checks over a recorded trace. Row k is taken to follow row k-1 by one step
// of size rows[k].dt whenever their step counters differ by one.

struct ConservationCheck {
    std::size_t steps = 0;     // consecutive row pairs examined
    std::size_t within = 0;    // pairs with |norm_err| <= 10 dt^2 (1 + |r|)^2
    double worst_ratio = 0.0;  // max |norm_err| / bound
    double fraction() const noexcept
    {
        return steps == 0 ? 1.0 : static_cast<double>(within) / static_cast<double>(steps);
    }
};
ConservationCheck check_conservation(std::span<const TraceRecord> trace);

struct MonotoneCheck {
    std::size_t pairs = 0;
    std::size_t increases = 0;   // r_k > r_{k-1} at all
    std::size_t violations = 0;  // r_k - r_{k-1} > allowance_coeff * dt^2 * |r_{k-1}|
    double max_increase = 0.0;
};
MonotoneCheck check_monotone(std::span<const TraceRecord> trace, double allowance_coeff);

struct DissipationCheck {
    std::size_t points = 0;   // interior rows with f > f_floor
    double max_rel_err = 0.0; // max |(r_{k+1}-r_{k-1})/(t_{k+1}-t_{k-1}) + 2 f_k| / (2 f_k)
};
DissipationCheck check_dissipation(std::span<const TraceRecord> trace, double f_floor = 1e-8);

struct MaxPrincipleCheck {
    double initial_min = 0.0;  // min R(0)
    double tol = 0.0;          // 1e-4 (1 + |min R(0)|)
    double worst_lower = 0.0;  // min_t R_min(t) - (min(min R(0), 0) - tol)
    double worst_sigma = 0.0;  // min_t R_min(t) + sigma - (1 - tol)
    bool ok() const noexcept { return worst_lower >= 0.0 && worst_sigma >= 0.0; }
};
MaxPrincipleCheck check_max_principle(std::span<const TraceRecord> trace, double sigma);

// u_M(t)^p / u_M(0)^p <= exp(int_0^t r)(1+eps) <= (1+eps)^2 u_m(t)^p / u_m(0)^p,
// the integral by the trapezoid rule on the trace.
struct HarnackCheck {
    double worst_upper = 0.0;  // max over rows of log(u_M ratio) - int r - log(1+eps)
    double worst_lower = 0.0;  // max over rows of int r + log(1+eps) - log(u_m ratio) - 2 log(1+eps)
    bool ok() const noexcept { return worst_upper <= 0.0 && worst_lower <= 0.0; }
};
HarnackCheck check_harnack(std::span<const TraceRecord> trace, double p, double eps = 1e-2);

// Index of the first row with r < 0, if r < 0 holds on every later row too.
struct SignFlip {
    std::optional<std::size_t> first_negative;
    bool stays_negative = false;
};
SignFlip find_sign_flip(std::span<const TraceRecord> trace);

// min over rows of r - lambda1.
double min_r_gap(std::span<const TraceRecord> trace, double lambda1);

}  // namespace curvflow
