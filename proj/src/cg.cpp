#include "curvflow/cg.hpp"

#include <cmath>

#include "curvflow/errors.hpp"
#include "curvflow/kernels.hpp"

namespace curvflow {

void ShiftedStiffness::apply(std::span<const double> x, std::span<double> y) const
{
    kernels::par::spmv(*stiffness, x, y);
    const auto n = static_cast<std::ptrdiff_t>(size());
#pragma omp parallel for schedule(static) if (size() >= kernels::kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        y[i] = scale * y[i] + shift[i] * x[i];
}

std::vector<double> ShiftedStiffness::jacobi_diagonal() const
{
    std::vector<double> d(size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = scale * stiffness->diagonal(i) + shift[i];
    return d;
}

CgResult solve_cg(const ShiftedStiffness& a, std::span<const double> b, std::span<double> x,
                  double tol, int max_iter)
{
    using kernels::par::dot;
    const std::size_t n = a.size();
    if (b.size() != n || x.size() != n)
        throw SizeMismatch("cg operand size mismatch");

    const auto diag = a.jacobi_diagonal();
    for (double d : diag)
        if (!(d > 0.0))
            throw InnerSolverFailure("operator diagonal is not positive");

    std::vector<double> r(n), z(n), p(n), q(n);
    a.apply(x, q);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = b[i] - q[i];

    CgResult out;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        out.converged = true;
        return out;
    }

    for (std::size_t i = 0; i < n; ++i)
        z[i] = r[i] / diag[i];
    p = z;
    double rho = dot(r, z);
    out.relative_residual = std::sqrt(dot(r, r)) / bnorm;

    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        if (out.relative_residual <= tol) {
            out.converged = true;
            return out;
        }
        a.apply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0))
            throw InnerSolverFailure("operator is not positive definite along a search direction");
        const double alpha = rho / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            z[i] = r[i] / diag[i];
        }
        const double rho_next = dot(r, z);
        const double beta = rho_next / rho;
        rho = rho_next;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
        out.relative_residual = std::sqrt(dot(r, r)) / bnorm;
    }
    out.converged = out.relative_residual <= tol;
    return out;
}

}  // namespace curvflow
