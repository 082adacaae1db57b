#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "curvflow/errors.hpp"
#include "curvflow/manifold.hpp"
#include "helpers.hpp"

using namespace curvflow;
using testing::kTwoPi;

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

struct TriMesh {
    std::vector<Vec3> v;
    std::vector<std::array<std::size_t, 3>> f;

    std::string off() const
    {
        std::ostringstream s;
        s.precision(17);
        s << "OFF\n" << v.size() << ' ' << f.size() << " 0\n";
        for (const auto& p : v)
            s << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
        for (const auto& t : f)
            s << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        return s.str();
    }
};

// Icosahedron refined `depth` times by edge midpoints pushed to the unit sphere.
TriMesh icosphere(int depth)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    m.f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
           {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    auto unit = [](Vec3 p) {
        const double n = norm(p);
        return Vec3{p[0] / n, p[1] / n, p[2] / n};
    };
    for (auto& p : m.v)
        p = unit(p);
    for (int d = 0; d < depth; ++d) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
        auto midpoint = [&](std::size_t a, std::size_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end())
                return it->second;
            const Vec3 p = unit({(m.v[a][0] + m.v[b][0]) / 2, (m.v[a][1] + m.v[b][1]) / 2,
                                 (m.v[a][2] + m.v[b][2]) / 2});
            m.v.push_back(p);
            mid[key] = m.v.size() - 1;
            return m.v.size() - 1;
        };
        std::vector<std::array<std::size_t, 3>> next;
        for (const auto& f : m.f) {
            const auto a = midpoint(f[0], f[1]);
            const auto b = midpoint(f[1], f[2]);
            const auto c = midpoint(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        m.f = std::move(next);
    }
    return m;
}

double triangle_area_sum(const TriMesh& m)
{
    double a = 0.0;
    for (const auto& f : m.f)
        a += 0.5 * norm(cross(sub(m.v[f[1]], m.v[f[0]]), sub(m.v[f[2]], m.v[f[0]])));
    return a;
}

// sum_T area_T |grad_T u|^2 for the piecewise linear interpolant of u.
double p1_dirichlet(const TriMesh& m, std::span<const double> u)
{
    double e = 0.0;
    for (const auto& f : m.f) {
        const Vec3 e1 = sub(m.v[f[1]], m.v[f[0]]);
        const Vec3 e2 = sub(m.v[f[2]], m.v[f[0]]);
        const double g11 = e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2];
        const double g12 = e1[0] * e2[0] + e1[1] * e2[1] + e1[2] * e2[2];
        const double g22 = e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2];
        const double det = g11 * g22 - g12 * g12;
        const double d1 = u[f[1]] - u[f[0]];
        const double d2 = u[f[2]] - u[f[0]];
        // |grad u|^2 = d^T G^{-1} d with G the edge Gram matrix.
        const double grad2 = (g22 * d1 * d1 - 2 * g12 * d1 * d2 + g11 * d2 * d2) / det;
        e += 0.5 * std::sqrt(det) * grad2;
    }
    return e;
}

}  // namespace

TEST_SUITE("manifold")
{
    TEST_CASE("torus grid volume and kernel")
    {
        const auto man = testing::circle(8);
        CHECK(man.volume() == doctest::Approx(kTwoPi).epsilon(1e-15));
        const auto sq = testing::torus2(4, 4, 1.0, 1.0);
        const auto s1 = sq.stiffness().multiply(testing::constant(sq, 1.0));
        for (double x : s1)
            CHECK(x == 0.0);
        const std::size_t counts[] = {3, 4, 5};
        const double lengths[] = {1.0, 2.0, 3.0};
        const auto cube = build_torus_grid(counts, lengths);
        CHECK(cube.volume() == doctest::Approx(6.0).epsilon(1e-15));
        CHECK(cube.dim() == 3);
    }

    TEST_CASE("grid spec errors")
    {
        const std::size_t counts[] = {8, 8};
        const double one[] = {1.0};
        CHECK_THROWS_AS(build_torus_grid(counts, one), InvalidGridSpec);
        const std::size_t small[] = {2};
        CHECK_THROWS_AS(build_torus_grid(small, one), InvalidGridSpec);
        const double neg[] = {-1.0};
        const std::size_t ok[] = {8};
        CHECK_THROWS_AS(build_torus_grid(ok, neg), InvalidGridSpec);
    }

    TEST_CASE("structural checks on grids and meshes")
    {
        CHECK(check_manifold(testing::circle(64)).ok());
        CHECK(check_manifold(testing::torus2(12, 7, 1.0, 3.0)).ok());
        const std::size_t counts[] = {4, 5, 6};
        const double lengths[] = {1.0, 1.0, 2.0};
        CHECK(check_manifold(build_torus_grid(counts, lengths)).ok());
        CHECK(check_manifold(parse_off_mesh(icosphere(2).off())).ok());
        CHECK(check_manifold(load_off_mesh(CURVFLOW_TEST_DATA "/octahedron.off")).ok());
    }

    TEST_CASE("sin x energy converges at second order")
    {
        // Oracle: int_0^{2pi} cos^2 = pi.
        double prev = 0.0;
        for (std::size_t n : {64u, 128u, 256u}) {
            const auto man = testing::circle(n);
            const auto u = testing::sample(man, [](auto x) { return std::sin(x[0]); });
            const double err = std::abs(dirichlet_energy(man, u) - std::numbers::pi);
            if (n == 256)
                CHECK(err / std::numbers::pi <= 1e-3);
            if (prev > 0.0)
                CHECK(prev / err >= 3.5);
            prev = err;
        }
    }

    TEST_CASE("integration")
    {
        const auto man = testing::circle(256);
        CHECK(integrate(man, testing::constant(man, 1.0)) == doctest::Approx(kTwoPi));
        CHECK(integrate(man, testing::constant(man, 0.0)) == 0.0);
        const auto c2 = testing::sample(man, [](auto x) { return std::cos(x[0]) * std::cos(x[0]); });
        CHECK(std::abs(integrate(man, c2) - std::numbers::pi) <= 1e-6);
        CHECK_THROWS_AS(integrate(man, std::vector<double>(3, 1.0)), SizeMismatch);
    }

    TEST_CASE("dirichlet energy invariances")
    {
        const auto man = testing::torus2(9, 11);
        CHECK(dirichlet_energy(man, testing::constant(man, 3.0)) == 0.0);
        auto u = testing::random_vector(man.node_count(), 3);
        const double e = dirichlet_energy(man, u);
        for (auto& x : u)
            x += 17.0;
        CHECK(dirichlet_energy(man, u) == doctest::Approx(e).epsilon(1e-12));
        CHECK_THROWS_AS(dirichlet_energy(man, std::vector<double>(2)), SizeMismatch);
    }

    TEST_CASE("laplacian of cos x and its convergence")
    {
        double prev = 0.0;
        for (std::size_t n : {64u, 128u, 256u}) {
            const auto man = testing::circle(n);
            const auto u = testing::sample(man, [](auto x) { return std::cos(x[0]); });
            const auto lap = laplacian_apply(man, u);
            std::vector<double> neg(u.size());
            for (std::size_t i = 0; i < u.size(); ++i)
                neg[i] = -u[i];
            const double err = testing::max_abs_diff(lap, neg);
            if (n == 256)
                CHECK(err <= 1e-3);
            if (prev > 0.0)
                CHECK(prev / err >= 3.5);
            prev = err;
            CHECK(std::abs(integrate(man, lap)) <= 1e-13);
        }
        const auto man = testing::circle(16);
        for (double x : laplacian_apply(man, testing::constant(man, 2.5)))
            CHECK(x == 0.0);
    }

    TEST_CASE("green identity on random fields")
    {
        for (const auto& man : {testing::torus2(13, 17, 2.0, 5.0), parse_off_mesh(icosphere(2).off())}) {
            const auto u = testing::random_vector(man.node_count(), 11);
            const auto v = testing::random_vector(man.node_count(), 12);
            const auto lap = laplacian_apply(man, u);
            const auto su = man.stiffness().multiply(u);
            std::vector<double> vl(u.size());
            double lhs_scale = 0.0, rhs = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                vl[i] = v[i] * lap[i];
                rhs += v[i] * su[i];
                lhs_scale += std::abs(v[i] * su[i]);
            }
            CHECK(std::abs(integrate(man, vl) + rhs) <= 1e-12 * lhs_scale);
        }
    }

    TEST_CASE("octahedron area equals direct triangle sum")
    {
        TriMesh oct;
        oct.v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        oct.f = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
        const auto man = load_off_mesh(CURVFLOW_TEST_DATA "/octahedron.off");
        CHECK(man.node_count() == 6);
        CHECK(man.dim() == 2);
        CHECK(man.volume() == doctest::Approx(triangle_area_sum(oct)).epsilon(1e-14));
        CHECK(man.volume() == doctest::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-14));
        const auto s1 = man.stiffness().multiply(testing::constant(man, 1.0));
        for (double x : s1)
            CHECK(std::abs(x) <= 1e-14);
    }

    TEST_CASE("icosphere area tends to 4 pi")
    {
        const auto mesh = icosphere(4);
        const auto man = parse_off_mesh(mesh.off(), "ico4");
        CHECK(man.volume() == doctest::Approx(triangle_area_sum(mesh)).epsilon(1e-12));
        CHECK(std::abs(man.volume() - 4.0 * std::numbers::pi) <= 0.01 * 4.0 * std::numbers::pi);
    }

    TEST_CASE("cotangent stiffness equals P1 Dirichlet energy")
    {
        const auto mesh = icosphere(2);
        const auto man = parse_off_mesh(mesh.off());
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto u = testing::random_vector(man.node_count(), seed);
            CHECK(dirichlet_energy(man, u) == doctest::Approx(p1_dirichlet(mesh, u)).epsilon(1e-12));
        }
    }

    TEST_CASE("OFF parsing errors and comments")
    {
        CHECK_THROWS_AS(parse_off_mesh("OF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"), MeshFormatError);
        CHECK_THROWS_AS(parse_off_mesh("OFF\n3 x 0\n"), MeshFormatError);
        CHECK_THROWS_AS(parse_off_mesh("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"),
                        NonTriangleFace);
        CHECK_THROWS_AS(parse_off_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"),
                        MeshFormatError);
        // open surface: a single triangle
        CHECK_THROWS_AS(parse_off_mesh("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"),
                        MeshFormatError);
        // tetrahedron with a collapsed vertex
        CHECK_THROWS_AS(parse_off_mesh("OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0.5 0.5 0\n"
                                       "3 0 1 2\n3 0 3 1\n3 1 3 2\n3 2 3 0\n"),
                        DegenerateTriangle);
        const auto tet = parse_off_mesh("# a tetrahedron\nOFF\n\n4 4 6\n# vertices\n0 0 0\n1 0 0\n"
                                        "0 1 0\n0 0 1\n\n3 0 2 1\n3 0 1 3\n3 1 2 3\n3 2 0 3\n");
        CHECK(tet.node_count() == 4);
        CHECK(check_manifold(tet).ok());
    }
}
