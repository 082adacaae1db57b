#include "curvflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "curvflow/cg.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/kernels.hpp"
#include "curvflow/random_field.hpp"

namespace curvflow {

EigenResult lambda1(const DiscreteManifold& man, std::span<const double> psi, double c,
                    double tol, int max_iter)
{
    if (!(tol > 0.0))
        throw InvalidArgument("eigen tolerance must be positive");
    if (!(c > 0.0))
        throw InvalidArgument("coefficient c must be > 0");
    const std::size_t n = man.node_count();
    if (psi.size() != n)
        throw SizeMismatch("psi size does not match manifold");
    const auto mass = man.mass();

    // Shift below min psi makes c S + M (psi - shift) positive definite.
    const double shift = *std::min_element(psi.begin(), psi.end()) - 1.0;
    ShiftedStiffness op{&man.stiffness(), c, NodeField(n)};
    for (std::size_t i = 0; i < n; ++i)
        op.shift[i] = mass[i] * (psi[i] - shift);

    auto m_normalize = [&](NodeField& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += mass[i] * v[i] * v[i];
        s = std::sqrt(s);
        for (auto& x : v)
            x /= s;
    };

    EigenResult out;
    NodeField v(n, 1.0);
    m_normalize(v);
    NodeField rhs(n), y(n, 0.0), sv(n);

    for (out.iterations = 0; out.iterations <= max_iter; ++out.iterations) {
        const auto parts = kernels::par::rayleigh_parts(mass, psi, v, 1.0);
        out.lambda1 = (c * dirichlet_energy(man, v) + parts.potential) / parts.power;

        kernels::par::spmv(man.stiffness(), v, sv);
        double res = 0.0, vmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::abs(c * sv[i] / mass[i] + psi[i] * v[i] - out.lambda1 * v[i]));
            vmax = std::max(vmax, std::abs(v[i]));
        }
        out.residual = res / vmax;
        if (out.residual <= tol)
            break;
        if (out.iterations == max_iter)
            throw EigenNoConvergence("inverse iteration did not reach tolerance after " +
                                     std::to_string(max_iter) + " iterations (residual " +
                                     std::to_string(out.residual) + ")");

        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = mass[i] * v[i];
            y[i] = v[i] / (out.lambda1 - shift);  // exact when v is already an eigenvector
        }
        const auto cg = solve_cg(op, rhs, y, 1e-13, 10 * static_cast<int>(n) + 200);
        if (!cg.converged && cg.relative_residual > 1e-9)
            throw InnerSolverFailure("inner CG stalled at relative residual " +
                                     std::to_string(cg.relative_residual));
        v = y;
        m_normalize(v);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += mass[i] * v[i];
    if (total < 0.0)
        for (auto& x : v)
            x = -x;
    out.eigenfunction = std::move(v);
    return out;
}

double energy_E(const DiscreteManifold& man, std::span<const double> u,
                std::span<const double> psi, double c, double p)
{
    if (u.size() != man.node_count() || psi.size() != man.node_count())
        throw SizeMismatch("field size does not match manifold");
    const auto mass = man.mass();
    double potential = 0.0, power = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        potential += mass[i] * psi[i] * u[i] * u[i];
        power += mass[i] * std::pow(std::abs(u[i]), p + 1.0);
    }
    if (power == 0.0)
        throw ZeroDenominator("E(u) undefined for u = 0");
    return (c * dirichlet_energy(man, u) + potential) / std::pow(power, 2.0 / (p + 1.0));
}

YEstimate estimate_Y_from_starts(const DiscreteManifold& man, std::span<const double> psi,
                                 FlowParams params, const std::vector<NodeField>& starts,
                                 const FlowConfig& cfg)
{
    if (starts.empty())
        throw InvalidArgument("estimate_Y needs at least one start");
    YEstimate est;
    est.starts.resize(starts.size());
    std::vector<std::string> errors(starts.size());
    const auto count = static_cast<std::ptrdiff_t>(starts.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            const auto res = run_flow(man, psi, starts[idx], params, cfg);
            est.starts[idx].r_final = res.r_infinity;
            est.starts[idx].energy = energy_E(man, res.final.u, psi, params.c, params.p);
            est.starts[idx].stop = res.stop;
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty())
            throw Error("multistart run failed: " + e);

    est.upper = std::numeric_limits<double>::infinity();
    for (const auto& s : est.starts)
        est.upper = std::min(est.upper, s.energy);
    return est;
}

YEstimate estimate_Y(const DiscreteManifold& man, std::span<const double> psi,
                     FlowParams params, int n_starts, std::uint64_t seed, const FlowConfig& cfg)
{
    if (n_starts < 1)
        throw InvalidArgument("n_starts must be >= 1");
    std::vector<NodeField> starts;
    starts.reserve(static_cast<std::size_t>(n_starts));
    for (int k = 0; k < n_starts; ++k)
        starts.push_back(log_normal_field(man, seed + static_cast<std::uint64_t>(k)));
    return estimate_Y_from_starts(man, psi, params, starts, cfg);
}

double y_sphere_constant(int n)
{
    if (n < 3)
        throw InvalidDimension("Y(S^n) is defined here for n >= 3");
    const double half = 0.5 * (n + 1);
    const double omega = 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
    return n * (n - 1.0) * std::pow(omega, 2.0 / n);
}

double holder_volume_factor(const DiscreteManifold& man, double p)
{
    return std::pow(man.volume(), (p - 1.0) / (p + 1.0));
}

bool volume_inequality_holds(double y_upper, double lambda1, double volume_factor, double slack)
{
    const double bound = volume_factor * lambda1;
    return lambda1 >= 0.0 ? y_upper <= bound + slack : y_upper >= bound - slack;
}

}  // namespace curvflow
