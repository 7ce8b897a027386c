#ifndef BISPEC_SCATTERING_HPP
#define BISPEC_SCATTERING_HPP

// Isozaki-type scattering function built from DtN data and plane waves
// phi_omega = e^{i kappa omega.x}, kappa^4 = lambda, together with its Born
// counterpart and the free biharmonic resolvent kernel.
//
// With f = phi_omega, g = Delta phi_omega = -kappa^2 phi_omega on |x| = R and
// I_d = int_{|x|=R} (Lambda_d data) phi_{-theta} ds, the identity
//     -kappa^2 I_1 + I_2 = -Vhat(p) - int V w phi_{-theta} + bc,
//     p = -kappa (omega - theta),  bc = -2 kappa^2 int phi_omega d_nu phi_{-theta} ds
// holds, w being the scattered solution. Dropping the term quadratic in V
// leaves the Born relation used by the inverse pipeline.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

#include "dtn.hpp"
#include "eig.hpp"
#include "errors.hpp"
#include "specfun.hpp"
#include "vec3.hpp"

namespace bispec {

using CVec3 = std::array<cplx, 3>;

enum class Grouping { SqrtLambdaOnBoth, SqrtLambdaOnFirstOnly };

inline const char* grouping_name(Grouping g)
{
    return g == Grouping::SqrtLambdaOnBoth ? "sqrtLambdaOnBoth" : "sqrtLambdaOnFirstOnly";
}

// Principal fourth root, rotated by a quarter turn when needed so Im >= 0.
inline cplx fourth_root(cplx lambda)
{
    if (lambda.imag() == 0.0 && lambda.real() <= 0.0)
        throw PreconditionError("fourth_root: lambda on the branch cut (-inf, 0]");
    cplx k = std::pow(lambda, 0.25);
    if (k.imag() < 0.0) k *= cplx(0.0, 1.0);
    return k;
}

struct ScatteringSample {
    Vec3 omega{}, theta{};
    double zeta = 0.0;
    cplx lambda = 0.0;
    cplx kappa = 0.0;
    cplx S = 0.0;
    cplx I1 = 0.0, I2 = 0.0;
    Grouping grouping = Grouping::SqrtLambdaOnFirstOnly;
    int lmax = 0;
};

inline cplx combine(Grouping g, cplx kappa, cplx I1, cplx I2)
{
    cplx sl = kappa * kappa;
    return g == Grouping::SqrtLambdaOnBoth ? -sl * (I1 + I2) : -sl * I1 + I2;
}

// Smallest plane-wave truncation meeting the tail criterion, checked
// against the dataset's channel count.
inline int scattering_lmax(const SpectralDataset& ds, cplx kappa, int lmax)
{
    double R = ds.grid.R;
    if (lmax <= 0) lmax = plane_wave_lmax(kappa, R);
    if (!plane_wave_tail_ok(kappa, R, lmax))
        throw TruncationError("plane-wave tail above 1e-14 at lmax=" + std::to_string(lmax));
    if (lmax > ds.lmax)
        throw TruncationError("plane waves at |kappa|=" + std::to_string(std::abs(kappa)) + " need lmax=" +
                              std::to_string(lmax) + " but the dataset has lmax=" + std::to_string(ds.lmax));
    return lmax;
}

// I_1, I_2 for explicit kappa (any sign of Im kappa; used for symmetry checks).
inline std::pair<cplx, cplx> scattering_integrals(const SpectralDataset& ds, cplx kappa, const Vec3& omega,
                                                  const Vec3& theta, int lmax)
{
    double R = ds.grid.R;
    cplx lambda = std::pow(kappa, 4);
    BoundaryField f = detail::plane_wave_coeffs(kappa, omega, R, lmax, false);
    BoundaryField psi = detail::plane_wave_coeffs(kappa, -theta, R, lmax, false);
    BoundaryField out1(R, lmax), out2(R, lmax);
    cplx k2 = kappa * kappa;
    for (int l = 0; l <= lmax; ++l) {
        Mat2 D = dtn_block(ds, lambda, l).response();
        for (int m = -l; m <= l; ++m) {
            cplx F = f(l, m), G = -k2 * F;
            out1(l, m) = D[0][0] * F + D[0][1] * G;
            out2(l, m) = D[1][0] * F + D[1][1] * G;
        }
    }
    return {bilinear_pairing(out1, psi), bilinear_pairing(out2, psi)};
}

// lmax <= 0 selects the truncation automatically.
inline ScatteringSample scattering_from_dtn(const SpectralDataset& ds, double zeta, const Vec3& omega,
                                            const Vec3& theta, int lmax = 0,
                                            Grouping grouping = Grouping::SqrtLambdaOnFirstOnly)
{
    require(zeta >= 1.0, "scattering_from_dtn: need zeta >= 1");
    ScatteringSample s;
    s.omega = omega;
    s.theta = theta;
    s.zeta = zeta;
    s.lambda = std::pow(cplx(zeta, 1.0), 4);
    s.kappa = fourth_root(s.lambda);
    s.lmax = scattering_lmax(ds, s.kappa, lmax);
    std::tie(s.I1, s.I2) = scattering_integrals(ds, s.kappa, omega, theta, s.lmax);
    s.grouping = grouping;
    s.S = combine(grouping, s.kappa, s.I1, s.I2);
    return s;
}

namespace detail {

inline cplx sinc(cplx z)
{
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0 + z * z * z * z / 120.0;
    return std::sin(z) / z;
}

} // namespace detail

// Vhat(p) = int V e^{-i p.x} dx for radial V and complex p, by the radial
// reduction 4 pi int_0^R V(r) r^2 sinc(w r) dr, w = sqrt(p.p).
inline cplx born_volume_term(const RadialPotential& V, const CVec3& p, double R, int nodes = 256)
{
    require(nodes >= 200, "born_volume_term: use at least 200 Gauss nodes");
    cplx w = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    GaussRule g = gauss_legendre(nodes, 0.0, R);
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        double r = g.nodes[i];
        s += g.weights[i] * V(r) * r * r * detail::sinc(w * r);
    }
    return 4.0 * std::numbers::pi * s;
}

// -2 kappa^2 int_{|x|=R} phi_omega d_nu phi_{-theta} ds.
inline cplx boundary_correction(cplx kappa, const Vec3& omega, const Vec3& theta, double R, int lmax)
{
    if (!plane_wave_tail_ok(kappa, R, lmax))
        throw TruncationError("boundary_correction: plane-wave tail above 1e-14 at lmax=" + std::to_string(lmax));
    BoundaryField f = detail::plane_wave_coeffs(kappa, omega, R, lmax, false);
    BoundaryField d = detail::plane_wave_coeffs(kappa, -theta, R, lmax, true);
    return -2.0 * kappa * kappa * bilinear_pairing(f, d);
}

// Born frequency p = -kappa (omega - theta).
inline CVec3 born_frequency(cplx kappa, const Vec3& omega, const Vec3& theta)
{
    return {-kappa * (omega[0] - theta[0]), -kappa * (omega[1] - theta[1]), -kappa * (omega[2] - theta[2])};
}

struct IsozakiCheck {
    cplx S = 0.0;       // with potential
    cplx S0 = 0.0;      // same grid, V = 0
    cplx born = 0.0;    // Vhat(p)
    cplx bc = 0.0;      // continuum boundary correction
    double residual = 0.0;          // |S - S0 + Vhat|
    double continuumResidual = 0.0; // |S - (-Vhat + bc)|
};

// Compares both sides of the identity with the resolvent term dropped. The
// boundary term is taken from the V = 0 dataset on the same grid, which is
// the discretization-consistent value of bc.
inline IsozakiCheck isozaki_identity_check(const SpectralDataset& ds, const SpectralDataset& ds0, double zeta,
                                           const Vec3& omega, const Vec3& theta,
                                           Grouping grouping = Grouping::SqrtLambdaOnFirstOnly, int lmax = 0)
{
    require(zeta >= 10.0, "isozaki_identity_check: need zeta >= 10");
    require(sup_bound(ds.potentialSamples) <= 0.2, "isozaki_identity_check: need |V| <= 0.2");
    require(ds0.potential.is_zero(), "isozaki_identity_check: reference dataset must have V = 0");
    require(ds.grid == ds0.grid, "isozaki_identity_check: datasets on different grids");
    IsozakiCheck c;
    auto s = scattering_from_dtn(ds, zeta, omega, theta, lmax, grouping);
    auto s0 = scattering_from_dtn(ds0, zeta, omega, theta, s.lmax, grouping);
    c.S = s.S;
    c.S0 = s0.S;
    c.born = born_volume_term(ds.potential, born_frequency(s.kappa, omega, theta), ds.grid.R);
    c.bc = boundary_correction(s.kappa, omega, theta, ds.grid.R, s.lmax);
    c.residual = std::abs(c.S - c.S0 + c.born);
    c.continuumResidual = std::abs(c.S - (-c.born + c.bc));
    return c;
}

struct GroupingCalibration {
    Grouping grouping = Grouping::SqrtLambdaOnFirstOnly;
    double residualBoth = 0.0;
    double residualFirstOnly = 0.0;
    double bornMagnitude = 0.0;
};

inline GroupingCalibration calibrate_grouping(const SpectralDataset& ds, const SpectralDataset& ds0, double zeta,
                                              const Vec3& omega, const Vec3& theta)
{
    require(!ds.potential.is_zero(), "calibrate_grouping: needs a nonzero potential");
    require(sup_bound(ds.potentialSamples) <= 0.1, "calibrate_grouping: need |V| <= 0.1");
    GroupingCalibration g;
    auto both = isozaki_identity_check(ds, ds0, zeta, omega, theta, Grouping::SqrtLambdaOnBoth);
    auto first = isozaki_identity_check(ds, ds0, zeta, omega, theta, Grouping::SqrtLambdaOnFirstOnly);
    g.residualBoth = both.residual;
    g.residualFirstOnly = first.residual;
    g.bornMagnitude = std::abs(first.born);
    g.grouping = g.residualFirstOnly <= g.residualBoth ? Grouping::SqrtLambdaOnFirstOnly : Grouping::SqrtLambdaOnBoth;
    double best = std::min(g.residualBoth, g.residualFirstOnly);
    if (!(best < 0.5 * g.bornMagnitude))
        throw Error("calibrate_grouping: neither grouping satisfies the identity (residuals " +
                    std::to_string(g.residualBoth) + ", " + std::to_string(g.residualFirstOnly) + ", |Vhat| " +
                    std::to_string(g.bornMagnitude) + ")");
    return g;
}

// (1/(2 sqrt(lambda))) (e^{i k+ s} - e^{i k- s}) / (4 pi s), k+- = sqrt(+-sqrt(lambda)), Im k+- >= 0.
inline cplx free_resolvent_kernel(cplx lambda, double s, double R = 1.0)
{
    if (lambda.imag() == 0.0 && lambda.real() <= 0.0)
        throw PreconditionError("free_resolvent_kernel: lambda on the branch cut (-inf, 0]");
    require(s > 0.0 && s <= 2.0 * R, "free_resolvent_kernel: need 0 < s <= 2R");
    cplx sl = std::sqrt(lambda);
    auto upper = [](cplx z) {
        cplx r = std::sqrt(z);
        return r.imag() < 0.0 ? -r : r;
    };
    cplx kp = upper(sl), km = upper(-sl);
    cplx i(0.0, 1.0);
    return (std::exp(i * kp * s) - std::exp(i * km * s)) / (2.0 * sl * 4.0 * std::numbers::pi * s);
}

struct ResonanceRegionParams {
    double A = 1.0;
    double C0 = 2.0;
    double deltaSlope = 0.45; // 0.9/(2R) at R = 1
};

inline ResonanceRegionParams default_region(double R)
{
    ResonanceRegionParams p;
    p.deltaSlope = 0.9 / (2.0 * R);
    return p;
}

inline bool in_region(cplx lambda, const ResonanceRegionParams& p)
{
    require(p.deltaSlope > 0.0, "in_region: delta must be positive");
    cplx k = fourth_root(lambda);
    double a = std::pow(std::abs(lambda), 0.25);
    double bound = -p.A - p.deltaSlope * std::log(1.0 + a);
    return k.imag() >= bound && k.real() >= bound && a >= p.C0;
}

} // namespace bispec

#endif // BISPEC_SCATTERING_HPP
