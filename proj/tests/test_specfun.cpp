#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "bispec/specfun.hpp"

using namespace bispec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double pi = std::numbers::pi;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Fixed seed so the random directions and coefficients are reproducible.
std::mt19937_64& rng()
{
    static std::mt19937_64 g(12345);
    return g;
}

Vec3 random_dir()
{
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v{n(rng()), n(rng()), n(rng())};
    return normalized(v);
}

} // namespace

TEST_CASE("sph_bessel_j closed forms and limits")
{
    CHECK_THAT(sph_bessel_j(0, 1.0).real(), WithinAbs(0.8414709848, 1e-10));
    CHECK_THAT(sph_bessel_j(1, 1.0).real(), WithinAbs(0.3011686789, 1e-10));
    CHECK(sph_bessel_j(1, 0.0) == cplx(0.0));
    CHECK(sph_bessel_j(0, 0.0) == cplx(1.0));
    for (cplx z : {cplx(0.3, 0.1), cplx(7.0, -2.0), cplx(45.0, 3.0)}) {
        cplx j0 = std::sin(z) / z;
        cplx j1 = std::sin(z) / (z * z) - std::cos(z) / z;
        cplx j2 = (3.0 / (z * z) - 1.0) * std::sin(z) / z - 3.0 * std::cos(z) / (z * z);
        CHECK(rel(sph_bessel_j(0, z), j0) < 1e-12);
        CHECK(rel(sph_bessel_j(1, z), j1) < 1e-11);
        CHECK(rel(sph_bessel_j(2, z), j2) < 1e-10);
    }
}

TEST_CASE("sph_bessel_j against high-precision references")
{
    struct Ref {
        int l;
        cplx z, v;
    };
    // 30-digit values of sqrt(pi/(2z)) J_{l+1/2}(z).
    const Ref refs[] = {
        {0, {3.7, 0.0}, {-0.1431989570022955, 0.0}},
        {5, {2.5, 1.5}, {-0.012958766293880497, 0.011686323647842886}},
        {20, {30.0, 2.0}, {-0.029765600411074266, 0.075443079484189592}},
        {40, {10.0, 1.0}, {-7.7672034391288407e-22, -6.8527822705001627e-22}},
        {60, {61.0, 1.0}, {0.020593754217965654, 0.0040536067808787622}},
        {76, {40.0, 1.0}, {-1.0142914744846213e-17, 1.9809307038971759e-16}},
        {120, {100.0, 3.0}, {-5.1262719518843706e-7, 1.0277108552301396e-6}},
        {3, {500.0, 0.5}, {-0.001980012508712086, 0.00050049879900443408}},
        {10, {0.3, 0.2}, {2.4784753346300219e-15, -1.0647758042029398e-15}},
    };
    for (const auto& r : refs) {
        INFO("l = " << r.l << ", z = " << r.z);
        CHECK(rel(sph_bessel_j(r.l, r.z), r.v) < 1e-10);
    }
}

TEST_CASE("series and recurrence branches agree")
{
    for (int l = 0; l <= 20; ++l)
        for (double x : {0.5, 2.0, 4.0})
            for (double y : {0.0, 0.7, -1.3}) {
                cplx z(x, y);
                if (std::abs(z) >= l + 1) continue;
                CHECK(rel(detail::bessel_series(l, z), detail::bessel_miller(l, z)) < 1e-9);
            }
}

TEST_CASE("sph_bessel_j preconditions and overflow guard")
{
    CHECK_THROWS_AS(sph_bessel_j(-1, 1.0), PreconditionError);
    CHECK_THROWS_AS(sph_bessel_j(kMaxDegree + 1, 1.0), PreconditionError);
    CHECK_THROWS_AS(sph_bessel_j(0, 2e4), PreconditionError);
    CHECK_THROWS_AS(sph_bessel_j(3, cplx(10.0, 800.0)), OverflowError);
}

TEST_CASE("sph_bessel_jp matches a centered difference")
{
    for (int l : {0, 1, 4, 15})
        for (cplx z : {cplx(3.0, 0.5), cplx(20.0, 1.0)}) {
            double h = 1e-5;
            cplx fd = (sph_bessel_j(l, z + h) - sph_bessel_j(l, z - h)) / (2.0 * h);
            CHECK(rel(sph_bessel_jp(l, z), fd) < 1e-7);
        }
}

TEST_CASE("sph_bessel_zeros by bisection")
{
    auto z0 = sph_bessel_zeros(0, 5);
    for (int k = 0; k < 5; ++k) CHECK_THAT(z0[std::size_t(k)], WithinAbs((k + 1) * pi, 1e-11));
    CHECK_THAT(sph_bessel_zeros(1, 1)[0], WithinAbs(4.493409457909064, 1e-11));
    CHECK_THAT(sph_bessel_zeros(2, 1)[0], WithinAbs(5.763459196894550, 1e-11));
    for (int l : {3, 10})
        for (double z : sph_bessel_zeros(l, 6)) CHECK(std::abs(sph_bessel_j(l, z)) < 1e-11);
}

TEST_CASE("spherical harmonics values and addition theorem")
{
    CHECK_THAT(sph_harm(0, 0, random_dir()).real(), WithinAbs(0.2820947918, 1e-10));
    CHECK_THAT(sph_harm(1, 0, {0.0, 0.0, 1.0}).real(), WithinAbs(0.4886025119, 1e-10));
    // Condon-Shortley: Y_11 = -sqrt(3/(8 pi)) sin(theta) e^{i phi}.
    Vec3 d = normalized(Vec3{1.0, 1.0, 0.5});
    double st = std::sqrt(1.0 - d[2] * d[2]), phi = std::atan2(d[1], d[0]);
    cplx y11 = -std::sqrt(3.0 / (8.0 * pi)) * st * std::polar(1.0, phi);
    CHECK(rel(sph_harm(1, 1, d), y11) < 1e-13);
    CHECK(rel(sph_harm(1, -1, d), -std::conj(y11)) < 1e-13);
    for (int l : {3, 17, 60}) {
        Vec3 u = random_dir();
        double s = 0.0;
        for (int m = -l; m <= l; ++m) s += std::norm(sph_harm(l, m, u));
        CHECK_THAT(s, WithinRel((2 * l + 1) / (4 * pi), 1e-12));
    }
}

TEST_CASE("gauss_legendre nodes, weights and exactness")
{
    auto g1 = gauss_legendre(1);
    CHECK_THAT(g1.nodes[0], WithinAbs(0.0, 1e-15));
    CHECK_THAT(g1.weights[0], WithinAbs(2.0, 1e-15));
    auto g2 = gauss_legendre(2);
    CHECK_THAT(g2.nodes[0], WithinAbs(-0.5773502692, 1e-10));
    CHECK_THAT(g2.nodes[1], WithinAbs(0.5773502692, 1e-10));
    CHECK_THAT(g2.weights[0], WithinAbs(1.0, 1e-14));
    auto g3 = gauss_legendre(3);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += g3.weights[i] * std::pow(g3.nodes[i], 4);
    CHECK_THAT(s, WithinAbs(0.4, 1e-15));
    for (int n : {7, 64, 512}) {
        auto g = gauss_legendre(n);
        double sw = 0.0, sp = 0.0;
        int deg = 2 * n - 2;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            CHECK(g.weights[i] > 0.0);
            CHECK_THAT(g.nodes[i], WithinAbs(-g.nodes[g.nodes.size() - 1 - i], 1e-14));
            sw += g.weights[i];
            sp += g.weights[i] * std::pow(g.nodes[i], deg);
        }
        CHECK_THAT(sw, WithinAbs(2.0, 1e-13));
        CHECK_THAT(sp, WithinAbs(2.0 / (deg + 1), 1e-13));
    }
    CHECK_THROWS_AS(gauss_legendre(0), PreconditionError);
    CHECK_THROWS_AS(gauss_legendre(513), PreconditionError);
}

TEST_CASE("sphere quadrature integrates harmonic products")
{
    auto q = sphere_quadrature(6);
    double total = 0.0;
    for (double w : q.weights) total += w;
    CHECK_THAT(total, WithinRel(4 * pi, 1e-12));
    cplx s2121 = 0.0, s2131 = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        cplx y21 = sph_harm(2, 1, q.nodes[i]), y31 = sph_harm(3, 1, q.nodes[i]);
        s2121 += q.weights[i] * y21 * std::conj(y21);
        s2131 += q.weights[i] * y21 * std::conj(y31);
    }
    CHECK(std::abs(s2121 - 1.0) < 1e-10);
    CHECK(std::abs(s2131) < 1e-10);
}

TEST_CASE("BoundaryField Parseval for random coefficients")
{
    int L = 8;
    BoundaryField f(1.7, L);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& c : f.coeffs) c = cplx(n(rng()), n(rng()));
    auto q = sphere_quadrature(L);
    double quad = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) quad += q.weights[i] * std::norm(f.evaluate(q.nodes[i]));
    quad *= f.radius * f.radius;
    CHECK_THAT(quad, WithinRel(f.norm2(), 1e-8));
}

TEST_CASE("bilinear_pairing equals the surface integral of a product")
{
    int L = 5;
    double R = 1.3;
    BoundaryField a(R, L), b(R, L);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& c : a.coeffs) c = cplx(n(rng()), n(rng()));
    for (auto& c : b.coeffs) c = cplx(n(rng()), n(rng()));
    auto q = sphere_quadrature(L);
    cplx s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * a.evaluate(q.nodes[i]) * b.evaluate(q.nodes[i]);
    CHECK(rel(bilinear_pairing(a, b), R * R * s) < 1e-10);
}

TEST_CASE("plane_wave_trace expansion")
{
    SECTION("kappa R = pi kills the l = 0 coefficient")
    {
        auto f = plane_wave_trace(pi, {0.0, 0.0, 1.0}, 1.0, 20);
        CHECK(std::abs(f(0, 0)) < 1e-15);
    }
    SECTION("kappa = 0 is the constant wave")
    {
        auto f = plane_wave_trace(0.0, random_dir(), 1.0, 5);
        CHECK_THAT(f(0, 0).real(), WithinAbs(std::sqrt(4 * pi), 1e-14));
        for (std::size_t i = 1; i < f.coeffs.size(); ++i) CHECK(std::abs(f.coeffs[i]) == 0.0);
    }
    SECTION("pointwise agreement with the exponential")
    {
        cplx k(2.0, 0.5);
        Vec3 w = random_dir();
        int L = plane_wave_lmax(k, 1.0);
        auto f = plane_wave_trace(k, w, 1.0, L);
        cplx i(0.0, 1.0);
        CHECK(rel(f.evaluate(w), std::exp(i * k)) < 1e-8);
        for (int t = 0; t < 5; ++t) {
            Vec3 x = random_dir();
            CHECK(rel(f.evaluate(x), std::exp(i * k * dot(w, x))) < 1e-8);
        }
    }
    SECTION("conjugate symmetry")
    {
        cplx k(3.0, 1.0);
        Vec3 w = random_dir();
        int L = plane_wave_lmax(k, 1.0);
        auto f = detail::plane_wave_coeffs(k, w, 1.0, L, false);
        auto g = detail::plane_wave_coeffs(std::conj(k), -w, 1.0, L, false);
        // conj(Y_lm) = (-1)^m Y_{l,-m}, so the coefficients of conj(f) are (-1)^m conj(c_{l,-m}).
        for (int l = 0; l <= L; ++l)
            for (int m = -l; m <= l; ++m) {
                cplx want = (m % 2 ? -1.0 : 1.0) * std::conj(f(l, -m));
                CHECK(std::abs(g(l, m) - want) <= 1e-12 * (1.0 + std::abs(want)));
            }
    }
    SECTION("normal trace matches a radial difference")
    {
        cplx k(4.0, 1.0);
        Vec3 w = random_dir(), x = random_dir();
        int L = plane_wave_lmax(k * 1.01, 1.0);
        auto d = plane_wave_normal_trace(k, w, 1.0, L);
        cplx i(0.0, 1.0);
        cplx exact = i * k * dot(w, x) * std::exp(i * k * dot(w, x));
        CHECK(rel(d.evaluate(x), exact) < 1e-8);
    }
    SECTION("preconditions")
    {
        CHECK_THROWS_AS(plane_wave_trace(cplx(1.0, -0.1), {1.0, 0.0, 0.0}, 1.0, 10), PreconditionError);
        CHECK(!plane_wave_tail_ok(cplx(20.0, 1.0), 1.0, 10));
    }
}
