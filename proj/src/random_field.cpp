#include "curvflow/random_field.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "curvflow/errors.hpp"

namespace curvflow {

NodeField log_normal_field(const DiscreteManifold& man, std::uint64_t seed,
                           const LogNormalOptions& opts)
{
    if (opts.features < 1 || !(opts.correlation_fraction > 0.0) || !(opts.log_std >= 0.0))
        throw InvalidArgument("invalid log-normal field options");

    const std::size_t d = man.coord_dim();
    const std::size_t n = man.node_count();
    const double ell = opts.correlation_fraction * man.diameter();
    const auto periods = man.periods();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    NodeField g(n, 0.0);
    std::vector<double> omega(d);
    for (int k = 0; k < opts.features; ++k) {
        for (std::size_t j = 0; j < d; ++j) {
            double w = normal(rng) / ell;
            if (periods[j] > 0.0) {
                const double base = 2.0 * std::numbers::pi / periods[j];
                w = base * std::round(w / base);
            }
            omega[j] = w;
        }
        const double amp = normal(rng);
        const double ph = phase(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = man.coordinates(i);
            double arg = ph;
            for (std::size_t j = 0; j < d; ++j)
                arg += omega[j] * x[j];
            g[i] += amp * std::cos(arg);
        }
    }

    // Standardise empirically so log_std is the realised spread.
    double mean = 0.0;
    for (double x : g)
        mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : g)
        var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    const double scale = var > 0.0 ? opts.log_std / std::sqrt(var) : 0.0;

    NodeField u(n);
    for (std::size_t i = 0; i < n; ++i)
        u[i] = std::exp(scale * (g[i] - mean));
    return u;
}

}  // namespace curvflow
