#include "curvflow/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "curvflow/errors.hpp"
#include "curvflow/kernels.hpp"

namespace curvflow {

DiscreteManifold::DiscreteManifold(int dim, std::size_t coord_dim,
                                   std::vector<double> coordinates, std::vector<double> mass,
                                   CsrMatrix stiffness, std::string label,
                                   std::vector<double> periods)
    : dim_(dim), coord_dim_(coord_dim), coords_(std::move(coordinates)),
      mass_(std::move(mass)), stiffness_(std::move(stiffness)), label_(std::move(label)),
      periods_(std::move(periods))
{
    if (mass_.empty())
        throw InvalidArgument("manifold has no nodes");
    if (coords_.size() != mass_.size() * coord_dim_ || stiffness_.rows() != mass_.size() ||
        periods_.size() != coord_dim_)
        throw SizeMismatch("manifold component sizes disagree");

    min_mass_ = std::numeric_limits<double>::infinity();
    for (double m : mass_) {
        if (!(m > 0.0))
            throw InvalidArgument("manifold mass entries must be positive");
        volume_ += m;
        min_mass_ = std::min(min_mass_, m);
    }
    for (std::size_t i = 0; i < mass_.size(); ++i)
        max_diag_ = std::max(max_diag_, stiffness_.diagonal(i));

    double sq = 0.0;
    for (std::size_t k = 0; k < coord_dim_; ++k) {
        double extent = 0.0;
        if (periods_[k] > 0.0) {
            extent = 0.5 * periods_[k];
        } else {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t i = 0; i < mass_.size(); ++i) {
                lo = std::min(lo, coords_[i * coord_dim_ + k]);
                hi = std::max(hi, coords_[i * coord_dim_ + k]);
            }
            extent = hi - lo;
        }
        sq += extent * extent;
    }
    diameter_ = std::sqrt(sq);
}

std::vector<double> DiscreteManifold::displacement(std::size_t a, std::size_t b) const
{
    std::vector<double> d(coord_dim_);
    for (std::size_t k = 0; k < coord_dim_; ++k) {
        double delta = coords_[b * coord_dim_ + k] - coords_[a * coord_dim_ + k];
        if (periods_[k] > 0.0)
            delta -= periods_[k] * std::round(delta / periods_[k]);
        d[k] = delta;
    }
    return d;
}

DiscreteManifold build_torus_grid(std::span<const std::size_t> counts,
                                  std::span<const double> lengths)
{
    if (counts.empty() || counts.size() != lengths.size())
        throw InvalidGridSpec("counts and lengths must be non-empty and of equal length");
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 3)
            throw InvalidGridSpec("every grid count must be at least 3");
        if (!(lengths[k] > 0.0) || !std::isfinite(lengths[k]))
            throw InvalidGridSpec("every grid length must be positive");
    }

    const std::size_t dim = counts.size();
    std::vector<double> h(dim);
    double cell = 1.0;
    std::size_t n = 1;
    for (std::size_t k = 0; k < dim; ++k) {
        h[k] = lengths[k] / static_cast<double>(counts[k]);
        cell *= h[k];
        n *= counts[k];
    }

    std::vector<std::size_t> stride(dim, 1);
    for (std::size_t k = 1; k < dim; ++k)
        stride[k] = stride[k - 1] * counts[k - 1];

    std::vector<double> coords(n * dim);
    std::vector<Triplet> entries;
    entries.reserve(n * (2 * dim + 1));
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t node = 0; node < n; ++node) {
        double diag = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            coords[node * dim + k] = static_cast<double>(idx[k]) * h[k];
            const double w = cell / (h[k] * h[k]);
            const std::size_t up = idx[k] + 1 == counts[k] ? node - idx[k] * stride[k]
                                                           : node + stride[k];
            const std::size_t down = idx[k] == 0 ? node + (counts[k] - 1) * stride[k]
                                                 : node - stride[k];
            entries.push_back({node, up, -w});
            entries.push_back({node, down, -w});
            diag += 2.0 * w;
        }
        entries.push_back({node, node, diag});
        for (std::size_t k = 0; k < dim; ++k) {
            if (++idx[k] < counts[k])
                break;
            idx[k] = 0;
        }
    }

    std::string label = "torus";
    for (std::size_t k = 0; k < dim; ++k)
        label += (k ? "x" : " ") + std::to_string(counts[k]);

    std::vector<double> mass(n, cell);
    // Total volume is exactly prod(lengths); the per-node cell volume carries
    // the roundoff of the division.
    return DiscreteManifold(static_cast<int>(dim), dim, std::move(coords), std::move(mass),
                            CsrMatrix::from_triplets(n, std::move(entries)), std::move(label),
                            std::vector<double>(lengths.begin(), lengths.end()));
}

double integrate(const DiscreteManifold& man, std::span<const double> f)
{
    if (f.size() != man.node_count())
        throw SizeMismatch("field size does not match manifold");
    return kernels::par::weighted_sum(man.mass(), f);
}

double dirichlet_energy(const DiscreteManifold& man, std::span<const double> u)
{
    if (u.size() != man.node_count())
        throw SizeMismatch("field size does not match manifold");
    return kernels::par::edge_energy(man.stiffness(), u);
}

NodeField laplacian_apply(const DiscreteManifold& man, std::span<const double> u)
{
    if (u.size() != man.node_count())
        throw SizeMismatch("field size does not match manifold");
    NodeField out(u.size());
    kernels::par::spmv(man.stiffness(), u, out);
    const auto mass = man.mass();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = -out[i] / mass[i];
    return out;
}

ManifoldCheck check_manifold(const DiscreteManifold& man, int probes, std::uint64_t seed)
{
    ManifoldCheck out;
    const auto& s = man.stiffness();
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto v = s.values();
    const std::size_t n = man.node_count();

    for (double m : man.mass())
        out.positive_mass = out.positive_mass && m > 0.0;

    double max_abs_row = 0.0;
    double max_row_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        double abs_sum = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            sum += v[k];
            abs_sum += std::abs(v[k]);
            out.symmetry_defect = std::max(out.symmetry_defect, std::abs(v[k] - s.at(ci[k], i)));
        }
        max_row_sum = std::max(max_row_sum, std::abs(sum));
        max_abs_row = std::max(max_abs_row, abs_sum);
    }
    out.row_sum_ratio = max_abs_row > 0.0 ? max_row_sum / max_abs_row : 0.0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    std::vector<double> sx(n);
    out.min_quadratic = std::numeric_limits<double>::infinity();
    for (int probe = 0; probe < probes; ++probe) {
        for (auto& xi : x)
            xi = normal(rng);
        kernels::ref::spmv(s, x, sx);
        const double q = kernels::ref::dot(x, sx) / kernels::ref::dot(x, x);
        out.min_quadratic = std::min(out.min_quadratic, q);
    }
    return out;
}

}  // namespace curvflow
