#include <doctest.h>

#include <cmath>
#include <omp.h>

#include "curvflow/cg.hpp"
#include "curvflow/csr.hpp"
#include "curvflow/kernels.hpp"
#include "helpers.hpp"

using namespace curvflow;
namespace ref = curvflow::kernels::ref;
namespace par = curvflow::kernels::par;

namespace {

bool close(double a, double b, double rel = 1e-12)
{
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

struct Fields {
    std::vector<double> mass, psi, u, su;
};

Fields make_fields(const DiscreteManifold& man, std::uint64_t seed)
{
    Fields f;
    f.mass.assign(man.mass().begin(), man.mass().end());
    f.psi = testing::random_vector(man.node_count(), seed, -2.0, 1.0);
    f.u = testing::random_vector(man.node_count(), seed + 1, 0.5, 1.5);
    f.su.resize(f.u.size());
    ref::spmv(man.stiffness(), f.u, f.su);
    return f;
}

}  // namespace

TEST_SUITE("kernels")
{
    TEST_CASE("csr assembly")
    {
        const auto a = CsrMatrix::from_triplets(3, {{0, 1, 2.0}, {1, 0, 2.0}, {0, 1, 0.5}, {2, 2, 4.0}});
        CHECK(a.rows() == 3);
        CHECK(a.at(0, 1) == 2.5);
        CHECK(a.at(1, 0) == 2.0);
        CHECK(a.at(1, 2) == 0.0);
        CHECK(a.diagonal(0) == 0.0);
        CHECK(a.diagonal(2) == 4.0);
        const auto y = a.multiply(std::vector<double>{1.0, 2.0, 3.0});
        CHECK(y == std::vector<double>{5.0, 2.0, 12.0});
    }

    TEST_CASE("serial and parallel kernels agree")
    {
        // 1-D below the parallel threshold, 2-D well above it.
        for (const auto& man : {testing::circle(1000), testing::torus2(160, 150)}) {
            const auto f = make_fields(man, 5);
            std::vector<double> y_ref(f.u.size()), y_par(f.u.size());
            ref::spmv(man.stiffness(), f.u, y_ref);
            par::spmv(man.stiffness(), f.u, y_par);
            CHECK(y_ref == y_par);

            CHECK(close(ref::dot(f.u, f.psi), par::dot(f.u, f.psi)));
            CHECK(close(ref::weighted_sum(f.mass, f.u), par::weighted_sum(f.mass, f.u)));
            CHECK(close(ref::edge_energy(man.stiffness(), f.u), par::edge_energy(man.stiffness(), f.u)));
            CHECK(close(ref::edge_energy(man.stiffness(), f.u), ref::dot(f.u, f.su), 1e-10));

            const auto rp_ref = ref::rayleigh_parts(f.mass, f.psi, f.u, 3.0);
            const auto rp_par = par::rayleigh_parts(f.mass, f.psi, f.u, 3.0);
            CHECK(close(rp_ref.potential, rp_par.potential));
            CHECK(close(rp_ref.power, rp_par.power));

            std::vector<double> c_ref(f.u.size()), c_par(f.u.size());
            const auto s_ref = ref::field_stats(f.mass, f.u, f.su, f.psi, 1.3, 3.0, 0.7, c_ref);
            const auto s_par = par::field_stats(f.mass, f.u, f.su, f.psi, 1.3, 3.0, 0.7, c_par);
            CHECK(c_ref == c_par);
            CHECK(close(s_ref.f, s_par.f));
            CHECK(s_ref.res_linf == s_par.res_linf);
            CHECK(s_ref.R_min == s_par.R_min);
            CHECK(s_ref.R_max == s_par.R_max);
            CHECK(s_ref.u_min == s_par.u_min);
            CHECK(s_ref.u_max == s_par.u_max);

            std::vector<double> o_ref(f.u.size()), o_par(f.u.size());
            const auto e_ref = ref::explicit_update(f.mass, f.u, f.su, f.psi, 1.3, 3.0, 0.7, 1e-4, o_ref);
            const auto e_par = par::explicit_update(f.mass, f.u, f.su, f.psi, 1.3, 3.0, 0.7, 1e-4, o_par);
            CHECK(o_ref == o_par);
            CHECK(close(e_ref.power, e_par.power));
            CHECK(e_ref.out_min == e_par.out_min);
        }
    }

    TEST_CASE("parallel reductions do not depend on the thread count")
    {
        const auto man = testing::torus2(200, 120);
        const auto f = make_fields(man, 9);
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        const double d1 = par::dot(f.u, f.psi);
        const double e1 = par::edge_energy(man.stiffness(), f.u);
        const auto s1 = par::field_stats(f.mass, f.u, f.su, f.psi, 1.0, 3.0, 0.1, {});
        omp_set_num_threads(4);
        CHECK(par::dot(f.u, f.psi) == d1);
        CHECK(par::edge_energy(man.stiffness(), f.u) == e1);
        CHECK(par::field_stats(f.mass, f.u, f.su, f.psi, 1.0, 3.0, 0.1, {}).f == s1.f);
        omp_set_num_threads(saved);
    }

    TEST_CASE("preconditioned CG solves a shifted stiffness system")
    {
        const auto man = testing::torus2(20, 20);
        ShiftedStiffness a{&man.stiffness(), 0.7, std::vector<double>(man.node_count())};
        for (std::size_t i = 0; i < a.shift.size(); ++i)
            a.shift[i] = man.mass()[i] * (1.0 + 0.5 * std::sin(static_cast<double>(i)));
        const auto x_true = testing::random_vector(man.node_count(), 4);
        std::vector<double> b(x_true.size()), x(x_true.size(), 0.0);
        a.apply(x_true, b);
        const auto res = solve_cg(a, b, x, 1e-13, 2000);
        CHECK(res.converged);
        CHECK(testing::max_abs_diff(x, x_true) <= 1e-9);
    }
}
