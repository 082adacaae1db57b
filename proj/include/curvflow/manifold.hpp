#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "curvflow/csr.hpp"

namespace curvflow {

// One scalar per node: conformal factor, potential, curvature, eigenfunction.
using NodeField = std::vector<double>;

// A closed discrete manifold: lumped volume weights plus a symmetric stiffness
// operator S with u^T S u ~ int |grad u|^2. The Laplacian is lap u = -M^{-1} S u.
// Immutable after construction.
class DiscreteManifold {
public:
    DiscreteManifold(int dim, std::size_t coord_dim, std::vector<double> coordinates,
                     std::vector<double> mass, CsrMatrix stiffness, std::string label,
                     std::vector<double> periods);

    std::size_t node_count() const noexcept { return mass_.size(); }
    int dim() const noexcept { return dim_; }
    // Number of coordinates stored per node (3 for embedded surfaces).
    std::size_t coord_dim() const noexcept { return coord_dim_; }
    std::span<const double> coordinates(std::size_t node) const noexcept
    {
        return {coords_.data() + node * coord_dim_, coord_dim_};
    }
    std::span<const double> mass() const noexcept { return mass_; }
    const CsrMatrix& stiffness() const noexcept { return stiffness_; }
    const std::string& label() const noexcept { return label_; }
    // Period of each coordinate (0 when the coordinate is not periodic).
    std::span<const double> periods() const noexcept { return periods_; }

    double volume() const noexcept { return volume_; }
    // Largest distance between two nodes (periodic distance on tori).
    double diameter() const noexcept { return diameter_; }
    double min_mass() const noexcept { return min_mass_; }
    double max_stiffness_diagonal() const noexcept { return max_diag_; }

    // Distance vector from node a to node b honouring periodicity.
    std::vector<double> displacement(std::size_t a, std::size_t b) const;

private:
    int dim_;
    std::size_t coord_dim_;
    std::vector<double> coords_;
    std::vector<double> mass_;
    CsrMatrix stiffness_;
    std::string label_;
    std::vector<double> periods_;
    double volume_ = 0.0;
    double diameter_ = 0.0;
    double min_mass_ = 0.0;
    double max_diag_ = 0.0;
};

// Periodic uniform grid with the 2n-point second-order stencil.
DiscreteManifold build_torus_grid(std::span<const std::size_t> counts,
                                  std::span<const double> lengths);

// Closed triangulated surface from an ASCII OFF file: cotangent stiffness,
// barycentric lumped mass.
DiscreteManifold load_off_mesh(const std::filesystem::path& path);
DiscreteManifold parse_off_mesh(const std::string& text, const std::string& label = "off");

double integrate(const DiscreteManifold& man, std::span<const double> f);
double dirichlet_energy(const DiscreteManifold& man, std::span<const double> u);
NodeField laplacian_apply(const DiscreteManifold& man, std::span<const double> u);

struct ManifoldCheck {
    double symmetry_defect = 0.0;   // max |S_ij - S_ji|
    double row_sum_ratio = 0.0;     // max_i |sum_j S_ij| / max_i sum_j |S_ij|
    double min_quadratic = 0.0;     // min over probes of x^T S x / |x|^2
    bool positive_mass = true;

    bool ok() const noexcept
    {
        return positive_mass && symmetry_defect == 0.0 && row_sum_ratio <= 1e-12 &&
               min_quadratic >= -1e-12;
    }
};

// Structural invariants of the stiffness operator, PSD tested on random probes.
ManifoldCheck check_manifold(const DiscreteManifold& man, int probes = 16,
                             std::uint64_t seed = 1);

}  // namespace curvflow
