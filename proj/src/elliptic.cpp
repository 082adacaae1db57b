#include "curvflow/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "curvflow/errors.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/kernels.hpp"

namespace curvflow {
namespace {

struct Residual {
    NodeField g;        // pointwise equation residual
    double h = 0.0;     // constraint residual
    double norm = 0.0;  // max(|g|_inf, |h|)
};

Residual evaluate(const DiscreteManifold& man, std::span<const double> psi, double c, double p,
                  std::span<const double> u, double r)
{
    const auto mass = man.mass();
    const std::size_t n = u.size();
    Residual out;
    out.g.resize(n);
    NodeField su(n);
    kernels::par::spmv(man.stiffness(), u, su);
    double power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double up = std::pow(u[i], p);
        out.g[i] = c * su[i] / mass[i] + psi[i] * u[i] - r * up;
        out.norm = std::max(out.norm, std::abs(out.g[i]));
        power += mass[i] * up * u[i];
    }
    out.h = power - 1.0;
    out.norm = std::max(out.norm, std::abs(out.h));
    return out;
}

}  // namespace

double residual_linf(const DiscreteManifold& man, std::span<const double> u,
                     std::span<const double> psi, double c, double p, double r)
{
    if (u.size() != man.node_count() || psi.size() != man.node_count())
        throw SizeMismatch("field size does not match manifold");
    for (double x : u)
        if (!(x > 0.0))
            throw NonPositiveField("residual needs a positive field");
    NodeField su(u.size());
    kernels::par::spmv(man.stiffness(), u, su);
    return kernels::par::field_stats(man.mass(), u, su, psi, c, p, r, {}).res_linf;
}

NewtonResult newton_constrained(const DiscreteManifold& man, std::span<const double> psi,
                                double c, double p, std::span<const double> u_init, double tol,
                                int max_iter)
{
    const std::size_t n = man.node_count();
    if (psi.size() != n || u_init.size() != n)
        throw SizeMismatch("field size does not match manifold");
    const auto mass = man.mass();
    const auto& s = man.stiffness();

    NewtonResult out;
    out.u = normalize(man, u_init, p);
    out.r = rayleigh_r(man, out.u, psi, c, p);
    Residual cur = evaluate(man, psi, c, p, out.u, out.r);

    using SpMat = Eigen::SparseMatrix<double>;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(s.nonzeros() + 2 * n);

    for (out.iterations = 0;; ++out.iterations) {
        out.residual_history.push_back(cur.norm);
        if (cur.norm <= tol)
            return out;
        if (out.iterations == max_iter)
            throw NewtonNoConvergence("constrained Newton did not converge in " +
                                      std::to_string(max_iter) + " iterations");

        trip.clear();
        const auto rp = s.row_ptr();
        const auto ci = s.col_idx();
        const auto v = s.values();
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n + 1));
        const auto last = static_cast<int>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int row = static_cast<int>(i);
            for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
                trip.emplace_back(row, static_cast<int>(ci[k]), c * v[k]);
            trip.emplace_back(row, row, mass[i] * (psi[i] - p * out.r * std::pow(out.u[i], p - 1.0)));
            const double b = -mass[i] * std::pow(out.u[i], p);
            trip.emplace_back(row, last, b);
            trip.emplace_back(last, row, b);
            rhs[row] = -mass[i] * cur.g[i];
        }
        rhs[last] = cur.h / (p + 1.0);

        SpMat k(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
        k.setFromTriplets(trip.begin(), trip.end());
        lu.compute(k);
        if (lu.info() != Eigen::Success)
            throw NewtonNoConvergence("bordered Jacobian factorisation failed: " +
                                      lu.lastErrorMessage());
        const Eigen::VectorXd delta = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !delta.allFinite())
            throw NewtonNoConvergence("bordered Jacobian solve failed");

        bool any_positive = false;
        bool accepted = false;
        NodeField trial(n);
        for (double step = 1.0; step > 1e-9; step *= 0.5) {
            bool positive = true;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = out.u[i] + step * delta[static_cast<Eigen::Index>(i)];
                positive = positive && trial[i] > 0.0;
            }
            if (!positive)
                continue;
            any_positive = true;
            const double r_trial = out.r + step * delta[last];
            Residual next = evaluate(man, psi, c, p, trial, r_trial);
            if (next.norm < cur.norm) {
                out.u = trial;
                out.r = r_trial;
                cur = std::move(next);
                accepted = true;
                break;
            }
        }
        if (!any_positive)
            throw PositivityLost("every damped Newton iterate left the positive cone");
        if (!accepted)
            throw NewtonNoConvergence("damping could not reduce the residual (at " +
                                      std::to_string(cur.norm) + ")");
    }
}

}  // namespace curvflow
