// Serial reference kernels against their OpenMP counterparts on square tori.
// Range argument: nodes per side.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "curvflow/kernels.hpp"
#include "curvflow/manifold.hpp"

namespace {

using namespace curvflow;

struct Fixture {
    DiscreteManifold man;
    std::vector<double> u, psi, su, out;

    explicit Fixture(std::size_t n)
        : man([n] {
              const std::size_t counts[] = {n, n};
              const double lengths[] = {2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
              return build_torus_grid(counts, lengths);
          }())
    {
        const std::size_t m = man.node_count();
        u.resize(m);
        psi.resize(m);
        su.resize(m);
        out.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            u[i] = 1.0 + 0.3 * std::sin(0.01 * static_cast<double>(i));
            psi[i] = -1.0 + 0.2 * std::cos(0.02 * static_cast<double>(i));
        }
        kernels::ref::spmv(man.stiffness(), u, su);
    }
};

Fixture& fixture(std::size_t n)
{
    static std::vector<std::pair<std::size_t, Fixture*>> cache;
    for (auto& [k, f] : cache)
        if (k == n)
            return *f;
    cache.emplace_back(n, new Fixture(n));
    return *cache.back().second;
}

#define KERNEL_PAIR(name, body)                                        \
    template <bool Par>                                                \
    void BM_##name(benchmark::State& state)                            \
    {                                                                  \
        auto& fx = fixture(static_cast<std::size_t>(state.range(0)));  \
        for (auto _ : state) {                                         \
            if constexpr (Par) {                                       \
                namespace k = kernels::par;                            \
                body;                                                  \
            } else {                                                   \
                namespace k = kernels::ref;                            \
                body;                                                  \
            }                                                          \
        }                                                              \
        state.SetItemsProcessed(state.iterations() *                   \
                                static_cast<long>(fx.man.node_count())); \
    }                                                                  \
    BENCHMARK(BM_##name<false>)->Name(#name "/ref")->Arg(64)->Arg(256)->Arg(1024); \
    BENCHMARK(BM_##name<true>)->Name(#name "/par")->Arg(64)->Arg(256)->Arg(1024);

KERNEL_PAIR(spmv, k::spmv(fx.man.stiffness(), fx.u, fx.out); benchmark::ClobberMemory())
KERNEL_PAIR(edge_energy, benchmark::DoNotOptimize(k::edge_energy(fx.man.stiffness(), fx.u)))
KERNEL_PAIR(rayleigh_parts, benchmark::DoNotOptimize(k::rayleigh_parts(fx.man.mass(), fx.psi, fx.u, 3.0)))
KERNEL_PAIR(field_stats,
            benchmark::DoNotOptimize(k::field_stats(fx.man.mass(), fx.u, fx.su, fx.psi, 1.0, 3.0, -1.0, {})))
KERNEL_PAIR(explicit_update,
            benchmark::DoNotOptimize(k::explicit_update(fx.man.mass(), fx.u, fx.su, fx.psi, 1.0, 3.0, -1.0,
                                                        1e-4, fx.out)))

}  // namespace

BENCHMARK_MAIN();
