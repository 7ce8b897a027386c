#include <catch_amalgamated.hpp>

#include <cmath>

#include "bispec/inversion.hpp"

using namespace bispec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double zeta = 10.0;

int plane_lmax() { return plane_wave_lmax(cplx(zeta, 1.0), 1.0); }

const SpectralDataset& ds_zero()
{
    static SpectralDataset ds = build_dataset(RadialPotential::zero(), build_grid(1.0, 200), plane_lmax(), 20);
    return ds;
}

const SpectralDataset& ds_bump()
{
    static SpectralDataset ds =
        build_dataset(RadialPotential::gaussian(0.1, 0.0, 0.2), build_grid(1.0, 200), plane_lmax(), 20);
    return ds;
}

} // namespace

TEST_CASE("Isozaki geometry")
{
    auto g = isozaki_geometry({1.0, 0.0, 0.0}, zeta);
    CHECK_THAT(g.c, WithinAbs(std::sqrt(1.0 - 1.0 / 400.0), 1e-15));
    CHECK_THAT(g.c, WithinAbs(0.99875, 1e-5));
    CHECK(g.eta == Vec3{0.0, 1.0, 0.0});
    CHECK_THAT(norm(g.omega), WithinAbs(1.0, 1e-15));
    CHECK_THAT(norm(g.theta), WithinAbs(1.0, 1e-15));
    CHECK_THAT(dot(g.eta, g.xi), WithinAbs(0.0, 1e-15));
    // kappa (omega - theta) = -xi - i xi/zeta
    cplx k = fourth_root(g.lambda);
    CHECK(std::abs(k - cplx(zeta, 1.0)) < 1e-12);
    for (int i = 0; i < 3; ++i) {
        cplx v = k * (g.omega[std::size_t(i)] - g.theta[std::size_t(i)]);
        cplx want = -g.xi[std::size_t(i)] * cplx(1.0, 1.0 / zeta);
        CHECK(std::abs(v - want) < 1e-13);
    }

    auto g0 = isozaki_geometry({0.0, 0.0, 0.0}, zeta);
    CHECK(g0.c == 1.0);
    CHECK(g0.omega == g0.theta);

    auto gs = isozaki_geometry({0.0, 0.0, 3.0}, zeta, Vec3{1.0, 1.0, 1.0});
    CHECK_THAT(gs.eta[0], WithinAbs(std::sqrt(0.5), 1e-15));
    CHECK_THAT(gs.eta[2], WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(isozaki_geometry({20.0, 0.0, 0.0}, zeta), PreconditionError);
    CHECK_THROWS_AS(isozaki_geometry({25.0, 0.0, 0.0}, zeta), PreconditionError);
}

TEST_CASE("identical datasets give zero samples and reconstruction")
{
    const auto& ds = ds_bump();
    CHECK(sample_vhat_difference(ds, ds, {2.0, 0.0, 0.0}, zeta) == cplx(0.0));
    ReconstructOptions opt;
    opt.nXi = 16;
    opt.mode = CutoffMode::Diagnostic;
    auto rec = reconstruct_difference(ds, ds, zeta, opt);
    for (double w : rec.W) CHECK(w == 0.0);
    CHECK(rec.relError == 0.0);
    CHECK(rec.samples.size() == 16);
    CHECK(rec.r.size() == 101);
}

TEST_CASE("Born samples approximate the Fourier transform of the difference")
{
    for (Vec3 xi : {Vec3{0.0, 0.0, 0.0}, Vec3{2.0, 0.0, 0.0}, Vec3{0.0, 3.0, 4.0}}) {
        cplx s = sample_vhat_difference(ds_zero(), ds_bump(), xi, zeta);
        cplx exact = vhat_difference(ds_zero().potential, ds_bump().potential, xi, zeta, 1.0);
        CAPTURE(xi[0], xi[1], xi[2]);
        CHECK(std::abs(s - exact) < 0.05 * std::abs(exact));
    }
    // At xi = 0 the frequency is real and Vhat(0) is the integral of V.
    cplx v0 = vhat_difference(RadialPotential::zero(), RadialPotential::gaussian(0.1, 0.0, 0.2), {0.0, 0.0, 0.0},
                              zeta, 1.0);
    CHECK_THAT(v0.real(), WithinRel(-0.1 * born_volume_term(RadialPotential::gaussian(1.0, 0.0, 0.2),
                                                            {0.0, 0.0, 0.0}, 1.0).real(), 1e-12));
}

TEST_CASE("reconstruction cutoffs")
{
    ReconstructOptions opt;
    opt.nXi = 16;
    opt.mode = CutoffMode::Compliant;
    auto rc = reconstruct_difference(ds_zero(), ds_bump(), zeta, opt);
    CHECK_THAT(rc.cutoff, WithinRel(std::pow(zeta, 1.0 / 6.0), 1e-15));
    CHECK(rc.tailDominated);
    opt.mode = CutoffMode::Diagnostic;
    auto rd = reconstruct_difference(ds_zero(), ds_bump(), zeta, opt);
    CHECK(rd.cutoff == 8.0);
    CHECK_FALSE(rd.tailDominated);
    CHECK(rd.relError < rc.relError);
    CHECK(rd.relError < 1.0);
    CHECK_THAT(rd.l2Diff, WithinRel(l2_norm(RadialPotential::gaussian(0.1, 0.0, 0.2), 1.0), 1e-12));
    opt.nXi = 8;
    CHECK_THROWS_AS(reconstruct_difference(ds_zero(), ds_bump(), zeta, opt), PreconditionError);
}

TEST_CASE("l2_norm")
{
    // Constant 1 on the unit ball: sqrt(4 pi / 3).
    CHECK_THAT(l2_norm(RadialPotential::constant(1.0), 1.0), WithinRel(std::sqrt(4.0 * std::numbers::pi / 3.0), 1e-13));
    // Gaussian: int exp(-r^2/w^2) dx = pi^{3/2} w^3 (tail beyond r = 1 negligible).
    CHECK_THAT(l2_norm(RadialPotential::gaussian(1.0, 0.0, 0.2), 1.0),
               WithinRel(std::sqrt(std::pow(std::numbers::pi, 1.5) * 0.008), 1e-9));
}

TEST_CASE("spectral discrepancy")
{
    auto g = build_grid(1.0, 200);
    auto d0 = build_dataset(RadialPotential::zero(), g, 12, 20);
    SECTION("a constant shift moves only eigenvalues")
    {
        auto dc = build_dataset(RadialPotential::constant(0.3), g, 12, 20);
        auto d = spectral_discrepancy(d0, dc, 0, 2, 100);
        CHECK_THAT(d.eps0, WithinAbs(0.3, 1e-6));
        CHECK(d.eps1 < 1e-8);
        CHECK(d.eps2 < 1e-6);
        CHECK_THAT(d.eps0TailBound, WithinAbs(0.3, 1e-15));
        CHECK(d.eps1TailBound > 0.0);
    }
    SECTION("linear in a small amplitude")
    {
        auto bump = RadialPotential::gaussian(1.0, 0.0, 0.2);
        auto d1 = spectral_discrepancy(d0, build_dataset(bump.scaled(0.02), g, 12, 20), 5, 2, 100);
        auto d2 = spectral_discrepancy(d0, build_dataset(bump.scaled(0.04), g, 12, 20), 5, 2, 100);
        double p = std::log(d2.eps / d1.eps) / std::log(2.0);
        CHECK_THAT(p, WithinAbs(1.0, 0.15));
        auto gi = spectral_discrepancy(d0, build_dataset(bump.scaled(0.02), g, 12, 20), 5, 2, 100, Pairing::GlobalIndex);
        CHECK(gi.eps >= d1.eps0);
    }
    SECTION("preconditions")
    {
        CHECK_THROWS_AS(spectral_discrepancy(d0, d0, 0, 1, 100), PreconditionError);
        CHECK_THROWS_AS(spectral_discrepancy(d0, d0, -1, 2, 100), PreconditionError);
        CHECK_THROWS_AS(spectral_discrepancy(d0, d0, 0, 2, d0.size() + 1), PreconditionError);
        auto other = build_dataset(RadialPotential::zero(), build_grid(1.0, 100), 12, 20);
        CHECK_THROWS_AS(spectral_discrepancy(d0, other, 0, 2, 10), PreconditionError);
    }
}

TEST_CASE("theoretical delta")
{
    CHECK_THAT(theoretical_delta(2, 0.25), WithinRel(1.0 / 576.0, 1e-15));
    CHECK_THAT(theoretical_delta(3, 0.25), WithinRel(1.0 / 816.0, 1e-15));
    CHECK(theoretical_delta(2, 0.1) < theoretical_delta(2, 0.2));
    CHECK_THROWS_AS(theoretical_delta(2, 0.3), PreconditionError);
    CHECK_THROWS_AS(theoretical_delta(1, 0.25), PreconditionError);
    CHECK_THROWS_AS(theoretical_delta(2, 0.25, 2), PreconditionError);
}

TEST_CASE("amplitude validation")
{
    CHECK_NOTHROW(validate_amplitudes({0.02, 0.05}));
    CHECK_THROWS_AS(validate_amplitudes({0.05}), PreconditionError);
    CHECK_THROWS_AS(validate_amplitudes({0.0, 0.05}), PreconditionError);
    CHECK_THROWS_AS(validate_amplitudes({0.05, 0.3}), PreconditionError);
    CHECK_THROWS_AS(validate_amplitudes({0.05, 0.05}), PreconditionError);
}

TEST_CASE("stability sweep on a small grid")
{
    SweepParams p;
    p.grid = build_grid(1.0, 100);
    p.V1 = RadialPotential::zero();
    p.bump = RadialPotential::gaussian(1.0, 0.0, 0.2);
    p.amplitudes = {0.04, 0.02};
    p.lmax = plane_lmax();
    p.kPerChannel = 10;
    p.offsets = {0, 3};
    p.Kmax = 50;
    p.zeta = zeta;
    p.recon.nXi = 16;
    auto res = stability_sweep(p);
    REQUIRE(res.size() == 2);
    for (const auto& r : res) {
        REQUIRE(r.reports.size() == 2);
        CHECK(r.reports[0].amplitude == 0.02);
        CHECK(r.monotone);
        CHECK(r.envelopeHolds);
        CHECK_THAT(r.deltaEmp, WithinAbs(1.0, 0.15));
        CHECK_THAT(r.deltaTheory, WithinRel(1.0 / 576.0, 1e-15));
    }
    CHECK(res[1].E == 3);
}
