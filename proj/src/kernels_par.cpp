#include <algorithm>
#include <cmath>
#include <vector>

#include "curvflow/kernels.hpp"

namespace curvflow::kernels::par {
namespace {

// Deterministic reduction: per-chunk partials in parallel, combined serially
// in chunk order.
template <class Partial, class Body, class Combine>
Partial chunked_reduce(std::size_t n, Body body, Combine combine)
{
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    if (chunks <= 1) {
        Partial acc{};
        body(acc, std::size_t{0}, n);
        return acc;
    }
    std::vector<Partial> parts(chunks);
    const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t ch = 0; ch < nchunks; ++ch) {
        const std::size_t lo = static_cast<std::size_t>(ch) * kReductionChunk;
        const std::size_t hi = std::min(n, lo + kReductionChunk);
        Partial acc{};
        body(acc, lo, hi);
        parts[static_cast<std::size_t>(ch)] = acc;
    }
    Partial total{};
    for (const auto& part : parts)
        total = combine(total, part);
    return total;
}

double add(double a, double b) { return a + b; }

}  // namespace

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto v = a.values();
    const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static) if (a.rows() >= kParallelThreshold)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double acc = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
            acc += v[k] * x[ci[k]];
        y[i] = acc;
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    return chunked_reduce<double>(
        a.size(),
        [&](double& acc, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                acc += a[i] * b[i];
        },
        add);
}

double weighted_sum(std::span<const double> w, std::span<const double> f)
{
    return dot(w, f);
}

double edge_energy(const CsrMatrix& s, std::span<const double> u)
{
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto v = s.values();
    const double twice = chunked_reduce<double>(
        s.rows(),
        [&](double& acc, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
                    if (ci[k] == i)
                        continue;
                    const double d = u[i] - u[ci[k]];
                    acc -= v[k] * d * d;
                }
            }
        },
        add);
    return 0.5 * twice;
}

RayleighParts rayleigh_parts(std::span<const double> mass, std::span<const double> psi,
                             std::span<const double> u, double p)
{
    return chunked_reduce<RayleighParts>(
        u.size(),
        [&](RayleighParts& acc, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                acc.potential += mass[i] * psi[i] * u[i] * u[i];
                acc.power += mass[i] * std::pow(u[i], p + 1.0);
            }
        },
        [](RayleighParts a, const RayleighParts& b) {
            a.potential += b.potential;
            a.power += b.power;
            return a;
        });
}

FieldStats field_stats(std::span<const double> mass, std::span<const double> u,
                       std::span<const double> su, std::span<const double> psi, double c,
                       double p, double r, std::span<double> curvature)
{
    const bool store = !curvature.empty();
    return chunked_reduce<FieldStats>(
        u.size(),
        [&](FieldStats& st, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double lap = -su[i] / mass[i];
                const double up = std::pow(u[i], p);
                const double R = (-c * lap + psi[i] * u[i]) / up;
                const double res = -c * lap + psi[i] * u[i] - r * up;
                const double d = R - r;
                st.f += mass[i] * d * d * up * u[i];
                st.res_linf = std::max(st.res_linf, std::abs(res));
                st.R_min = std::min(st.R_min, R);
                st.R_max = std::max(st.R_max, R);
                st.u_min = std::min(st.u_min, u[i]);
                st.u_max = std::max(st.u_max, u[i]);
                if (store)
                    curvature[i] = R;
            }
        },
        [](FieldStats a, const FieldStats& b) {
            a.f += b.f;
            a.res_linf = std::max(a.res_linf, b.res_linf);
            a.R_min = std::min(a.R_min, b.R_min);
            a.R_max = std::max(a.R_max, b.R_max);
            a.u_min = std::min(a.u_min, b.u_min);
            a.u_max = std::max(a.u_max, b.u_max);
            return a;
        });
}

UpdateStats explicit_update(std::span<const double> mass, std::span<const double> u,
                            std::span<const double> su, std::span<const double> psi, double c,
                            double p, double r, double dt, std::span<double> out)
{
    return chunked_reduce<UpdateStats>(
        u.size(),
        [&](UpdateStats& st, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double lap = -su[i] / mass[i];
                const double rate =
                    std::pow(u[i], 1.0 - p) * (c * lap - psi[i] * u[i]) + r * u[i];
                out[i] = u[i] + dt * rate;
                st.out_min = std::min(st.out_min, out[i]);
                if (out[i] > 0.0)
                    st.power += mass[i] * std::pow(out[i], p + 1.0);
            }
        },
        [](UpdateStats a, const UpdateStats& b) {
            a.power += b.power;
            a.out_min = std::min(a.out_min, b.out_min);
            return a;
        });
}

}  // namespace curvflow::kernels::par
