#ifndef BISPEC_SPECFUN_HPP
#define BISPEC_SPECFUN_HPP

// Spherical Bessel functions of complex argument, complex spherical harmonics
// (Condon-Shortley phase), Gauss-Legendre rules, product sphere quadrature and
// the boundary expansion of plane waves e^{i kappa omega.x}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "vec3.hpp"

namespace bispec {

using cplx = std::complex<double>;

// Highest degree supported by the Bessel and harmonic routines. Plane waves at
// kappa ~ 40 on the unit sphere need about 90 channels.
inline constexpr int kMaxDegree = 150;

namespace detail {

inline cplx bessel_series(int l, cplx z)
{
    cplx lead = 1.0;
    for (int i = 1; i <= l; ++i) lead *= z / double(2 * i + 1);
    cplx x = -0.5 * z * z;
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= x / (double(k) * double(2 * l + 2 * k + 1));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return lead * sum;
}

inline cplx bessel_miller(int l, cplx z)
{
    double az = std::abs(z);
    int start = l + int(std::ceil(az)) + 15 + int(std::ceil(8.0 * std::cbrt(az)));
    cplx fnext = 0.0, f = 1e-30, fl = 0.0, f1 = 0.0;
    if (start == l) fl = f;
    for (int n = start; n > 0; --n) {
        cplx fprev = double(2 * n + 1) / z * f - fnext;
        fnext = f;
        f = fprev;
        if (n - 1 == l) fl = f;
        if (n - 1 == 1) f1 = f;
        if (std::abs(f) > 1e200) {
            f *= 1e-200; fnext *= 1e-200; fl *= 1e-200; f1 *= 1e-200;
        }
    }
    cplx f0 = f;
    if (l == 0) fl = f0;
    if (l == 1) f1 = fnext;
    cplx s = std::sin(z), c = std::cos(z);
    if (std::abs(f0) >= std::abs(f1)) return fl * ((s / z) / f0);
    return fl * ((s / (z * z) - c / z) / f1);
}

} // namespace detail

// j_l(z). Power series for small |z| (|z| < l+1 and |z|^2 < 8l+12, beyond which
// the alternating series cancels too many digits), normalized downward
// recurrence otherwise.
inline cplx sph_bessel_j(int l, cplx z)
{
    require(l >= 0 && l <= kMaxDegree, "sph_bessel_j: order out of range");
    require(std::abs(z) <= 1e4, "sph_bessel_j: |z| > 1e4");
    if (std::abs(z.imag()) > 700.0)
        throw OverflowError("sph_bessel_j: |Im z| > 700 overflows double; use a scaled representation");
    if (z == cplx(0.0)) return l == 0 ? 1.0 : 0.0;
    if (std::abs(z) < l + 1 && std::norm(z) < 8.0 * l + 12.0) return detail::bessel_series(l, z);
    return detail::bessel_miller(l, z);
}

// d/dz j_l(z).
inline cplx sph_bessel_jp(int l, cplx z)
{
    if (l == 0) return -sph_bessel_j(1, z);
    return (double(l) * sph_bessel_j(l - 1, z) - double(l + 1) * sph_bessel_j(l + 1, z)) / double(2 * l + 1);
}

// First `count` positive zeros of j_l on the real axis: sign changes on a
// step-0.05 scan, then bisection to `tol`.
inline std::vector<double> sph_bessel_zeros(int l, int count, double tol = 1e-12)
{
    require(count >= 1, "sph_bessel_zeros: count must be >= 1");
    require(tol > 0.0, "sph_bessel_zeros: tol must be positive");
    auto f = [l](double x) { return sph_bessel_j(l, x).real(); };
    std::vector<double> z;
    double step = 0.05, x = 0.5 * l + step;
    double fx = f(x);
    while (int(z.size()) < count) {
        double y = x + step, fy = f(y);
        if (fx == 0.0) {
            z.push_back(x);
        } else if ((fx < 0.0) != (fy < 0.0)) {
            double lo = x, hi = y, flo = fx;
            while (hi - lo > tol * std::max(1.0, lo)) {
                double mid = 0.5 * (lo + hi), fm = f(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            z.push_back(0.5 * (lo + hi));
        }
        x = y;
        fx = fy;
    }
    return z;
}

inline int sh_index(int l, int m) { return l * l + l + m; }

// All Y_lm(dir) for 0 <= l <= lmax, indexed by sh_index. Condon-Shortley phase.
inline std::vector<cplx> sph_harm_all(int lmax, const Vec3& dir)
{
    require(lmax >= 0 && lmax <= kMaxDegree, "sph_harm: degree out of range");
    double r = norm(dir);
    require(std::abs(r - 1.0) < 1e-9, "sph_harm: direction must be a unit vector");
    double x = std::clamp(dir[2] / r, -1.0, 1.0);
    double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    double phi = std::atan2(dir[1], dir[0]);

    std::vector<cplx> y(std::size_t((lmax + 1) * (lmax + 1)));
    // Normalized associated Legendre by the standard stable recurrence in l.
    double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    for (int m = 0; m <= lmax; ++m) {
        if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        cplx e = std::polar(1.0, m * phi);
        double p2 = 0.0, p1 = pmm;
        y[std::size_t(sh_index(m, m))] = p1 * e;
        for (int l = m + 1; l <= lmax; ++l) {
            double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
            double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
            double p = a * (x * p1 - b * p2);
            p2 = p1;
            p1 = p;
            y[std::size_t(sh_index(l, m))] = p * e;
        }
    }
    for (int l = 1; l <= lmax; ++l)
        for (int m = 1; m <= l; ++m) {
            double sign = (m % 2) ? -1.0 : 1.0;
            y[std::size_t(sh_index(l, -m))] = sign * std::conj(y[std::size_t(sh_index(l, m))]);
        }
    return y;
}

inline cplx sph_harm(int l, int m, const Vec3& dir)
{
    require(l >= 0 && std::abs(m) <= l, "sph_harm: need |m| <= l");
    return sph_harm_all(l, dir)[std::size_t(sh_index(l, m))];
}

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes ascending on [-1, 1].
inline GaussRule gauss_legendre(int npts)
{
    require(npts >= 1 && npts <= 512, "gauss_legendre: npts must be in [1, 512]");
    GaussRule g;
    g.nodes.resize(static_cast<std::size_t>(npts));
    g.weights.resize(static_cast<std::size_t>(npts));
    int half = (npts + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double dp = 0.0;
        bool done = false;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= npts; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = npts * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                done = true;
                break;
            }
        }
        if (!done) throw ConvergenceError("gauss_legendre: Newton failed for root " + std::to_string(i));
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[std::size_t(i)] = -x;
        g.nodes[std::size_t(npts - 1 - i)] = x;
        g.weights[std::size_t(i)] = w;
        g.weights[std::size_t(npts - 1 - i)] = w;
    }
    if (npts % 2) g.nodes[std::size_t(npts / 2)] = 0.0;
    return g;
}

// Gauss rule mapped to [a, b].
inline GaussRule gauss_legendre(int npts, double a, double b)
{
    GaussRule g = gauss_legendre(npts);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        g.nodes[i] = 0.5 * (b - a) * (g.nodes[i] + 1.0) + a;
        g.weights[i] *= 0.5 * (b - a);
    }
    return g;
}

struct SphereQuadrature {
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    int degree = 0;
};

// Gauss-Legendre in cos(polar) times the uniform azimuthal rule.
inline SphereQuadrature sphere_quadrature(int lmax)
{
    require(lmax >= 0 && lmax <= kMaxDegree, "sphere_quadrature: lmax out of range");
    SphereQuadrature q;
    q.degree = 2 * lmax;
    GaussRule g = gauss_legendre(lmax + 1);
    int nphi = 2 * lmax + 2;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        double ct = g.nodes[i], st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < nphi; ++j) {
            double phi = 2.0 * std::numbers::pi * j / nphi;
            q.nodes.push_back({st * std::cos(phi), st * std::sin(phi), ct});
            q.weights.push_back(g.weights[i] * 2.0 * std::numbers::pi / nphi);
        }
    }
    return q;
}

// Function on the sphere of radius R as coefficients in Y_lm.
struct BoundaryField {
    double radius = 1.0;
    int lmax = 0;
    std::vector<cplx> coeffs;

    BoundaryField() = default;
    BoundaryField(double R, int L) : radius(R), lmax(L), coeffs(std::size_t((L + 1) * (L + 1))) {}

    cplx& operator()(int l, int m) { return coeffs[std::size_t(sh_index(l, m))]; }
    const cplx& operator()(int l, int m) const { return coeffs[std::size_t(sh_index(l, m))]; }

    cplx evaluate(const Vec3& dir) const
    {
        auto y = sph_harm_all(lmax, dir);
        cplx s = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * y[i];
        return s;
    }

    // R^2 sum |c|^2 = integral of |f|^2 over the sphere of radius R.
    double norm2() const
    {
        double s = 0.0;
        for (auto c : coeffs) s += std::norm(c);
        return radius * radius * s;
    }
};

// Bilinear surface integral of a*b (no conjugation) over the sphere of radius R.
inline cplx bilinear_pairing(const BoundaryField& a, const BoundaryField& b)
{
    int L = std::min(a.lmax, b.lmax);
    cplx s = 0.0;
    for (int l = 0; l <= L; ++l)
        for (int m = -l; m <= l; ++m) {
            double sign = (m % 2) ? -1.0 : 1.0;
            s += sign * a(l, m) * b(l, -m);
        }
    return a.radius * a.radius * s;
}

// True when |4 pi j_lmax(kappa R)| < 1e-14 max_l |4 pi j_l(kappa R)|.
inline bool plane_wave_tail_ok(cplx kappa, double R, int lmax)
{
    double big = 0.0;
    for (int l = 0; l <= lmax; ++l) big = std::max(big, std::abs(sph_bessel_j(l, kappa * R)));
    if (big == 0.0) return true;
    return std::abs(sph_bessel_j(lmax, kappa * R)) < 1e-14 * big;
}

// Smallest lmax meeting the tail criterion.
inline int plane_wave_lmax(cplx kappa, double R)
{
    double big = 0.0;
    for (int l = 0; l <= kMaxDegree; ++l) {
        double v = std::abs(sph_bessel_j(l, kappa * R));
        big = std::max(big, v);
        if (l > 0 && v < 1e-14 * big) return l;
    }
    throw TruncationError("plane wave needs more than " + std::to_string(kMaxDegree) + " channels");
}

namespace detail {

// Radial factor 4 pi i^l j_l(kappa R), or its kappa j_l' analogue, times
// conj(Y_lm(omega)). No branch check.
inline BoundaryField plane_wave_coeffs(cplx kappa, const Vec3& omega, double R, int lmax, bool normal)
{
    BoundaryField f(R, lmax);
    auto y = sph_harm_all(lmax, omega);
    cplx il = 1.0;
    for (int l = 0; l <= lmax; ++l) {
        cplx z = kappa * R;
        cplx radial = 4.0 * std::numbers::pi * il * (normal ? kappa * sph_bessel_jp(l, z) : sph_bessel_j(l, z));
        for (int m = -l; m <= l; ++m) f(l, m) = radial * std::conj(y[std::size_t(sh_index(l, m))]);
        il *= cplx(0.0, 1.0);
    }
    return f;
}

} // namespace detail

// Coefficients c_lm = 4 pi i^l j_l(kappa R) conj(Y_lm(omega)) of e^{i kappa omega.x}
// restricted to |x| = R.
inline BoundaryField plane_wave_trace(cplx kappa, const Vec3& omega, double R, int lmax)
{
    require(kappa.imag() >= 0.0, "plane_wave_trace: need Im kappa >= 0");
    return detail::plane_wave_coeffs(kappa, omega, R, lmax, false);
}

// Coefficients of the outward normal derivative of e^{i kappa omega.x} on |x| = R.
inline BoundaryField plane_wave_normal_trace(cplx kappa, const Vec3& omega, double R, int lmax)
{
    require(kappa.imag() >= 0.0, "plane_wave_normal_trace: need Im kappa >= 0");
    return detail::plane_wave_coeffs(kappa, omega, R, lmax, true);
}

} // namespace bispec

#endif // BISPEC_SPECFUN_HPP
