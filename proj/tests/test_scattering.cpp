#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "bispec/scattering.hpp"

using namespace bispec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double pi = std::numbers::pi;
const double zeta = 10.0;

int lmax_for(double z) { return plane_wave_lmax(fourth_root(std::pow(cplx(z, 1.0), 4)), 1.0); }

const SpectralDataset& ds_zero()
{
    static SpectralDataset ds = build_dataset(RadialPotential::zero(), build_grid(1.0, 200), lmax_for(zeta), 20);
    return ds;
}

const SpectralDataset& ds_bump()
{
    static SpectralDataset ds =
        build_dataset(RadialPotential::gaussian(0.05, 0.0, 0.2), build_grid(1.0, 200), lmax_for(zeta), 20);
    return ds;
}

// Vhat(p) for real p along the z axis by composite Simpson in r and cos(theta).
cplx vhat_simpson(const RadialPotential& V, double p, int n = 1000)
{
    auto simpson_w = [n](int i) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double hr = 1.0 / n, ht = 2.0 / n;
    cplx s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double r = i * hr, vr = V(r) * r * r;
        if (vr == 0.0) continue;
        cplx inner = 0.0;
        for (int j = 0; j <= n; ++j) {
            double t = -1.0 + j * ht;
            inner += simpson_w(j) * std::exp(cplx(0.0, -p * r * t));
        }
        s += simpson_w(i) * vr * inner * (ht / 3.0);
    }
    return 2.0 * pi * s * (hr / 3.0);
}

Vec3 rotate_z(const Vec3& v, double a)
{
    return {std::cos(a) * v[0] - std::sin(a) * v[1], std::sin(a) * v[0] + std::cos(a) * v[1], v[2]};
}

} // namespace

TEST_CASE("fourth_root")
{
    CHECK(std::abs(fourth_root(16.0) - 2.0) < 1e-15);
    cplx z(3.0, 1.0);
    CHECK(std::abs(fourth_root(std::pow(z, 4)) - z) < 1e-13);
    CHECK(std::abs(fourth_root(cplx(0.0, 1.0)) - std::polar(1.0, pi / 8)) < 1e-15);
    cplx w(10.0, 1.0);
    CHECK(std::abs(fourth_root(std::pow(w, 4)) - w) < 1e-12);
    for (double x : {-1.0, -4.0, 0.0}) CHECK_THROWS_AS(fourth_root(cplx(x, 0.0)), PreconditionError);
    CHECK(fourth_root(cplx(-4.0, 1e-3)).imag() >= 0.0);
}

TEST_CASE("combine groupings")
{
    cplx k(2.0, 0.5), a(1.0, 2.0), b(-3.0, 0.25);
    CHECK(std::abs(combine(Grouping::SqrtLambdaOnFirstOnly, k, a, b) - (-k * k * a + b)) < 1e-14);
    CHECK(std::abs(combine(Grouping::SqrtLambdaOnBoth, k, a, b) - (-k * k * (a + b))) < 1e-14);
    CHECK(std::string(grouping_name(Grouping::SqrtLambdaOnFirstOnly)) == "sqrtLambdaOnFirstOnly");
}

TEST_CASE("born_volume_term at p = 0 against Monte Carlo")
{
    auto V = RadialPotential::gaussian(1.0, 0.0, 0.2);
    cplx exact = born_volume_term(V, {0.0, 0.0, 0.0}, 1.0);
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    const int n = 2000000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = u(rng), y = u(rng), z = u(rng);
        sum += V(std::sqrt(x * x + y * y + z * z));
    }
    double mc = sum / n * std::pow(1.6, 3);
    CHECK(std::abs(exact.imag()) < 1e-15);
    CHECK_THAT(exact.real(), WithinRel(mc, 0.015));
    // Full-space Gaussian integral, truncated at r = 1 where the tail is negligible.
    CHECK_THAT(exact.real(), WithinRel(std::pow(2.0 * pi, 1.5) * 0.008, 1e-4));
}

TEST_CASE("born_volume_term at real p against direct quadrature")
{
    auto V = RadialPotential::gaussian(1.0, 0.3, 0.15) + RadialPotential::constant(0.2);
    for (double p : {0.5, 3.0, 12.0}) {
        cplx ref = vhat_simpson(V, p);
        cplx got = born_volume_term(V, {0.0, 0.0, p}, 1.0);
        CAPTURE(p);
        CHECK(std::abs(got - ref) <= 1e-6 * std::abs(ref));
        CHECK(std::abs(born_volume_term(V, {p, 0.0, 0.0}, 1.0) - got) <= 1e-12 * std::abs(got));
    }
    CHECK_THROWS_AS(born_volume_term(V, {1.0, 0.0, 0.0}, 1.0, 100), PreconditionError);
}

TEST_CASE("boundary_correction against sphere quadrature")
{
    cplx k(3.0, 0.5);
    Vec3 om{0.0, 0.6, 0.8}, th{1.0, 0.0, 0.0};
    int L = plane_wave_lmax(k, 1.0);
    cplx got = boundary_correction(k, om, th, 1.0, L);
    auto q = sphere_quadrature(60);
    cplx s = 0.0;
    cplx i(0.0, 1.0);
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const Vec3& n = q.nodes[j];
        cplx f = std::exp(i * k * dot(om, n));
        cplx dpsi = -i * k * dot(th, n) * std::exp(-i * k * dot(th, n));
        s += q.weights[j] * f * dpsi;
    }
    cplx ref = -2.0 * k * k * s;
    CHECK(std::abs(got - ref) <= 1e-10 * std::abs(ref));
    CHECK_THROWS_AS(boundary_correction(k, om, th, 1.0, 2), TruncationError);
}

TEST_CASE("scattering from V = 0 data converges to the boundary term")
{
    Vec3 om{0.0, 1.0, 0.0}, th = normalized({0.1, 1.0, 0.0});
    auto fine = build_dataset(RadialPotential::zero(), build_grid(1.0, 400), lmax_for(zeta), 20);
    auto s1 = scattering_from_dtn(ds_zero(), zeta, om, th);
    auto s2 = scattering_from_dtn(fine, zeta, om, th);
    cplx bc = boundary_correction(s1.kappa, om, th, 1.0, s1.lmax);
    double e1 = std::abs(s1.S - bc), e2 = std::abs(s2.S - bc);
    CHECK(e2 < 1e-2 * std::abs(bc));
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("scattering symmetries")
{
    const auto& ds = ds_bump();
    Vec3 om = normalized({0.2, 1.0, 0.3}), th = normalized({0.3, 0.9, -0.1});
    cplx k = fourth_root(std::pow(cplx(zeta, 1.0), 4));
    int L = scattering_lmax(ds, k, 0);

    SECTION("rotation invariance for radial V")
    {
        auto [a, b] = scattering_integrals(ds, k, om, th, L);
        auto [ra, rb] = scattering_integrals(ds, k, rotate_z(om, 0.7), rotate_z(th, 0.7), L);
        CHECK(std::abs(a - ra) <= 1e-9 * std::abs(a));
        CHECK(std::abs(b - rb) <= 1e-9 * std::abs(b));
    }
    SECTION("conjugation")
    {
        auto [a, b] = scattering_integrals(ds, k, om, th, L);
        auto [ca, cb] = scattering_integrals(ds, -std::conj(k), om, th, L);
        CHECK(std::abs(ca - std::conj(a)) <= 1e-9 * std::abs(a));
        CHECK(std::abs(cb - std::conj(b)) <= 1e-9 * std::abs(b));
    }
    SECTION("truncation is checked against the dataset")
    {
        auto small = build_dataset(RadialPotential::zero(), build_grid(1.0, 100), 10, 10);
        CHECK_THROWS_AS(scattering_from_dtn(small, zeta, om, th), TruncationError);
        CHECK_THROWS_AS(scattering_from_dtn(ds, zeta, om, th, 3), TruncationError);
    }
}

TEST_CASE("Isozaki identity with the Born term")
{
    const auto& ds = ds_bump();
    Vec3 om{0.0, 1.0, 0.0}, th = normalized({0.2, 1.0, 0.0});
    auto c = isozaki_identity_check(ds, ds_zero(), zeta, om, th);
    CHECK(c.residual < 0.05 * std::abs(c.born));
    CHECK_THROWS_AS(isozaki_identity_check(ds, ds_zero(), 5.0, om, th), PreconditionError);
    CHECK_THROWS_AS(isozaki_identity_check(ds, ds_bump(), zeta, om, th), PreconditionError);

    SECTION("calibration")
    {
        auto g = calibrate_grouping(ds, ds_zero(), zeta, om, th);
        CHECK(g.grouping == Grouping::SqrtLambdaOnFirstOnly);
        CHECK(g.residualBoth > 10.0 * g.residualFirstOnly);
        CHECK_THROWS_AS(calibrate_grouping(ds_zero(), ds_zero(), zeta, om, th), PreconditionError);
    }
}

TEST_CASE("free resolvent kernel")
{
    // lambda = 16 + i0: sqrt(lambda) = 4, k+ = 2, k- = 2i.
    cplx lam(16.0, 1e-12);
    for (double s : {0.1, 0.5, 1.7}) {
        cplx ref = (std::exp(cplx(0.0, 2.0 * s)) - std::exp(-2.0 * s)) / (8.0 * 4.0 * pi * s);
        CHECK(std::abs(free_resolvent_kernel(lam, s) - ref) < 1e-10);
    }
    cplx z = std::pow(cplx(5.0, 1.0), 4);
    CHECK(std::abs(1e-6 * free_resolvent_kernel(z, 1e-6)) < 1e-6);
    CHECK(std::abs(free_resolvent_kernel(z, 1e-6) - free_resolvent_kernel(z, 2e-6)) < 1e-4);
    CHECK_THROWS_AS(free_resolvent_kernel(cplx(-1.0, 0.0), 0.5), PreconditionError);
    CHECK_THROWS_AS(free_resolvent_kernel(z, 2.5), PreconditionError);
    CHECK_THROWS_AS(free_resolvent_kernel(z, 0.0), PreconditionError);
}

TEST_CASE("resonance-free region")
{
    auto p = default_region(1.0);
    CHECK_THAT(p.deltaSlope, WithinAbs(0.45, 1e-15));
    CHECK(in_region(std::pow(cplx(10.0, 1.0), 4), p));
    CHECK(in_region(std::pow(cplx(3.0, 0.2), 4), p));
    CHECK_FALSE(in_region(cplx(1.0, 0.1), p));
    p.deltaSlope = 0.0;
    CHECK_THROWS_AS(in_region(cplx(100.0, 1.0), p), PreconditionError);
}
