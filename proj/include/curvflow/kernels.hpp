#pragma once

// Data-parallel inner loops of the flow solvers.
//
// Every kernel exists twice: `ref` is the plain serial loop kept as the
// reference implementation for tests and benchmarks, `par` is the OpenMP
// version used by the library. Reductions in `par` are taken over fixed-size
// chunks and combined in chunk order, so results are bit-identical for any
// thread count.

#include <cstddef>
#include <limits>
#include <span>

#include "curvflow/csr.hpp"

namespace curvflow::kernels {

// Below this many nodes the OpenMP kernels run on the calling thread.
inline constexpr std::size_t kParallelThreshold = 4096;
// Reduction granularity of the parallel kernels.
inline constexpr std::size_t kReductionChunk = 1024;

struct RayleighParts {
    double potential = 0.0;  // sum m_i psi_i u_i^2
    double power = 0.0;      // sum m_i u_i^{p+1}
};

struct FieldStats {
    double f = 0.0;         // sum m_i (R_i - r)^2 u_i^{p+1}
    double res_linf = 0.0;  // max |-c lap_i + psi_i u_i - r u_i^p|
    double R_min = std::numeric_limits<double>::infinity();
    double R_max = -std::numeric_limits<double>::infinity();
    double u_min = std::numeric_limits<double>::infinity();
    double u_max = -std::numeric_limits<double>::infinity();
};

struct UpdateStats {
    double power = 0.0;  // sum m_i out_i^{p+1}
    double out_min = std::numeric_limits<double>::infinity();
};

#define CURVFLOW_KERNEL_DECLS                                                              \
    void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);         \
    double dot(std::span<const double> a, std::span<const double> b);                      \
    double weighted_sum(std::span<const double> w, std::span<const double> f);             \
    /* 1/2 sum_{i != j} (-S_ij)(u_i - u_j)^2, equal to u^T S u when rows sum to zero */    \
    double edge_energy(const CsrMatrix& s, std::span<const double> u);                     \
    RayleighParts rayleigh_parts(std::span<const double> mass, std::span<const double> psi, \
                                 std::span<const double> u, double p);                     \
    /* Writes R_i into curvature when it is non-empty. */                                  \
    FieldStats field_stats(std::span<const double> mass, std::span<const double> u,        \
                           std::span<const double> su, std::span<const double> psi,        \
                           double c, double p, double r, std::span<double> curvature);     \
    /* out = u + dt (u^{1-p}(c lap u - psi u) + r u) */                                    \
    UpdateStats explicit_update(std::span<const double> mass, std::span<const double> u,   \
                                std::span<const double> su, std::span<const double> psi,   \
                                double c, double p, double r, double dt,                   \
                                std::span<double> out);

namespace ref {
CURVFLOW_KERNEL_DECLS
}

namespace par {
CURVFLOW_KERNEL_DECLS
}

#undef CURVFLOW_KERNEL_DECLS

}  // namespace curvflow::kernels
