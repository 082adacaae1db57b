#include <algorithm>
#include <cmath>

#include "curvflow/kernels.hpp"

namespace curvflow::kernels::ref {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto v = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
            acc += v[k] * x[ci[k]];
        y[i] = acc;
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
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
    double acc = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            if (ci[k] == i)
                continue;
            const double d = u[i] - u[ci[k]];
            acc -= v[k] * d * d;
        }
    }
    return 0.5 * acc;
}

RayleighParts rayleigh_parts(std::span<const double> mass, std::span<const double> psi,
                             std::span<const double> u, double p)
{
    RayleighParts out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.potential += mass[i] * psi[i] * u[i] * u[i];
        out.power += mass[i] * std::pow(u[i], p + 1.0);
    }
    return out;
}

FieldStats field_stats(std::span<const double> mass, std::span<const double> u,
                       std::span<const double> su, std::span<const double> psi, double c,
                       double p, double r, std::span<double> curvature)
{
    FieldStats st;
    for (std::size_t i = 0; i < u.size(); ++i) {
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
        if (!curvature.empty())
            curvature[i] = R;
    }
    return st;
}

UpdateStats explicit_update(std::span<const double> mass, std::span<const double> u,
                            std::span<const double> su, std::span<const double> psi, double c,
                            double p, double r, double dt, std::span<double> out)
{
    UpdateStats st;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double lap = -su[i] / mass[i];
        const double rate = std::pow(u[i], 1.0 - p) * (c * lap - psi[i] * u[i]) + r * u[i];
        out[i] = u[i] + dt * rate;
        st.out_min = std::min(st.out_min, out[i]);
        if (out[i] > 0.0)
            st.power += mass[i] * std::pow(out[i], p + 1.0);
    }
    return st;
}

}  // namespace curvflow::kernels::ref
