#pragma once

#include <span>
#include <vector>

#include "curvflow/csr.hpp"

namespace curvflow {

// A = scale * S + diag(shift); symmetric, positive definite when the caller
// keeps shift > 0 and S positive semidefinite.
struct ShiftedStiffness {
    const CsrMatrix* stiffness = nullptr;
    double scale = 1.0;
    std::vector<double> shift;

    std::size_t size() const noexcept { return shift.size(); }
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> jacobi_diagonal() const;
};

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// Jacobi-preconditioned conjugate gradients; x holds the initial guess on
// entry. Converged when |b - Ax| <= tol |b|.
CgResult solve_cg(const ShiftedStiffness& a, std::span<const double> b, std::span<double> x,
                  double tol, int max_iter);

}  // namespace curvflow
