#include <doctest.h>

#include <cmath>

#include "curvflow/elliptic.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/presets.hpp"
#include "helpers.hpp"

using namespace curvflow;
using testing::kTwoPi;

TEST_SUITE("elliptic")
{
    TEST_CASE("constant potential from constant data")
    {
        const auto man = testing::circle(64);
        for (double a : {-1.0, 0.5, 2.0}) {
            const auto res = newton_constrained(man, testing::constant(man, a), 1.0, 3.0, testing::constant(man, 0.3));
            CHECK(res.iterations <= 2);
            CHECK(res.r == doctest::Approx(a * std::sqrt(kTwoPi)).epsilon(1e-12));
            for (double x : res.u)
                CHECK(x == doctest::Approx(std::pow(kTwoPi, -0.25)).epsilon(1e-12));
            CHECK(residual_linf(man, res.u, testing::constant(man, a), 1.0, 3.0, res.r) <= 1e-10);
        }
    }

    TEST_CASE("newton from the flow limit barely moves")
    {
        const auto sc = make_preset("thm2", 3);
        const auto flow = run_flow(sc.man, sc.psi, sc.u0, sc.params, sc.cfg);
        REQUIRE(flow.stop == StopReason::Converged);
        const auto res = newton_constrained(sc.man, sc.psi, 1.0, 3.0, flow.final.u);
        CHECK(res.iterations <= 5);
        CHECK(testing::max_abs_diff(res.u, flow.final.u) <= 1e-6);
        CHECK(std::abs(res.r - flow.r_infinity) <= 1e-8);
        CHECK(residual_linf(sc.man, res.u, sc.psi, 1.0, 3.0, res.r) <= 1e-10);
    }

    TEST_CASE("quadratic tail from a perturbed start")
    {
        const auto man = testing::circle(128);
        const auto psi = testing::sample(man, [](auto x) { return -1.0 + 0.3 * std::cos(x[0]); });
        const auto u0 = testing::sample(man, [](auto x) { return 1.0 + 0.2 * std::cos(2.0 * x[0]) + 0.1 * std::sin(x[0]); });
        const auto res = newton_constrained(man, psi, 1.0, 3.0, u0, 1e-12);
        std::vector<double> h;
        for (double x : res.residual_history)
            if (x > 1e-10)
                h.push_back(x);
        REQUIRE(h.size() >= 3);
        for (std::size_t k = h.size() - 2; k + 1 < h.size(); ++k)
            CHECK(h[k + 1] <= 1e3 * std::pow(h[k], 1.5));
        CHECK(h[h.size() - 1] <= 1e3 * std::pow(h[h.size() - 2], 1.5));
        CHECK(h[h.size() - 2] <= 1e3 * std::pow(h[h.size() - 3], 1.5));
    }

    TEST_CASE("residual")
    {
        const auto man = testing::circle(128);
        const auto psi = testing::constant(man, -1.0);
        const double c0 = std::pow(kTwoPi, -0.25);
        const double r = -std::sqrt(kTwoPi);
        CHECK(residual_linf(man, testing::constant(man, c0), psi, 1.0, 3.0, r) <= 1e-12);

        // first-order growth in the perturbation size
        std::vector<double> res;
        for (double d : {1e-3, 5e-4, 2.5e-4}) {
            const auto u = testing::sample(man, [&](auto x) { return c0 + d * std::cos(x[0]); });
            res.push_back(residual_linf(man, u, psi, 1.0, 3.0, r));
        }
        CHECK(res[0] / res[1] == doctest::Approx(2.0).epsilon(0.01));
        CHECK(res[1] / res[2] == doctest::Approx(2.0).epsilon(0.01));

        auto bad = testing::constant(man, c0);
        bad[0] = -0.1;
        CHECK_THROWS_AS(residual_linf(man, bad, psi, 1.0, 3.0, r), NonPositiveField);
    }

    TEST_CASE("residual matches the trace column")
    {
        const auto sc = make_preset("torus2", 2);
        FlowConfig cfg = sc.cfg;
        cfg.max_steps = 5;
        const auto flow = run_flow(sc.man, sc.psi, sc.u0, sc.params, cfg);
        const double res = residual_linf(sc.man, flow.final.u, sc.psi, 1.0, 3.0, flow.final.r);
        CHECK(res == flow.trace.back().res_linf);
    }

    TEST_CASE("failure modes")
    {
        const auto man = testing::circle(64);
        const auto psi = testing::sample(man, [](auto x) { return -1.0 + 0.3 * std::cos(x[0]); });
        const auto u0 = testing::sample(man, [](auto x) { return 1.0 + 0.5 * std::cos(3.0 * x[0]); });
        CHECK_THROWS_AS(newton_constrained(man, psi, 1.0, 3.0, u0, 1e-12, 1), NewtonNoConvergence);
        CHECK_THROWS_AS(newton_constrained(man, psi, 1.0, 3.0, std::vector<double>(3, 1.0)), SizeMismatch);
    }
}
