#ifndef BISPEC_DTN_HPP
#define BISPEC_DTN_HPP

// Dirichlet-to-Neumann maps of the Navier problem from spectral data.
//
// For boundary data u = f, Delta u = g on |x| = R with channel coefficients
// (F, G), the outputs are the coefficients of d_nu u and d_nu(Delta u). With
// A_q = R a_q, B_q = R b_q the spectral kernel is
//     K = sum_q j! / (lambda_q - lambda)^{j+1} [[A A, A B], [A B, B B]]
// and Green's identity pairs f with B and g with A, so
//     out1 = K11 G + K12 F,   out2 = K21 G + K22 F.
// At j = 0 three of the four series diverge in the continuum limit; on the
// grid the complete channel sum is finite and the discrete DtN equals it plus
// a polynomial boundary (contact) term, carried separately in C.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "eig.hpp"
#include "errors.hpp"
#include "specfun.hpp"

namespace bispec {

using Mat2 = std::array<std::array<cplx, 2>, 2>;

inline Mat2 operator-(const Mat2& x, const Mat2& y)
{
    Mat2 z;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z[i][j] = x[i][j] - y[i][j];
    return z;
}

inline Mat2 operator+(const Mat2& x, const Mat2& y)
{
    Mat2 z;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z[i][j] = x[i][j] + y[i][j];
    return z;
}

inline Mat2 operator*(cplx s, const Mat2& x)
{
    Mat2 z;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) z[i][j] = s * x[i][j];
    return z;
}

inline double max_abs(const Mat2& x)
{
    double m = 0.0;
    for (const auto& r : x)
        for (auto v : r) m = std::max(m, std::abs(v));
    return m;
}

// Largest singular value of a complex 2x2 matrix.
inline double spectral_norm(const Mat2& x)
{
    double a = std::norm(x[0][0]) + std::norm(x[1][0]);
    double d = std::norm(x[0][1]) + std::norm(x[1][1]);
    cplx b = std::conj(x[0][0]) * x[0][1] + std::conj(x[1][0]) * x[1][1];
    double tr = a + d, det = a * d - std::norm(b);
    double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return std::sqrt(0.5 * tr + disc);
}

// Index windows on the global mode rank k (1-based). Modes not listed in the
// dataset's global view rank above every listed one.
struct Window {
    enum class Kind { All, Hat, Tilde, Tail };
    Kind kind = Kind::All;
    int E = 0;
    int EOfLambda = 0;

    static Window all() { return {}; }

    bool contains(int rank) const
    {
        bool listed = rank > 0;
        switch (kind) {
        case Kind::All: return true;
        case Kind::Hat: return listed && rank <= E;
        case Kind::Tilde: return listed && rank > E && rank <= EOfLambda;
        case Kind::Tail: return !listed || rank > EOfLambda;
        }
        return false;
    }

    bool has_contact() const { return kind == Kind::All || kind == Kind::Tail; }
};

struct DtnBlock {
    int ell = 0;
    int m = 0;
    cplx lambda = 0.0;
    int jOrder = 0;
    Window window;
    Mat2 M{};  // symmetric spectral kernel K
    Mat2 C{};  // contact term in output layout

    // 2x2 map (F, G) -> (out1, out2).
    Mat2 response() const
    {
        Mat2 D{};
        D[0][0] = M[0][1];
        D[0][1] = M[0][0];
        D[1][0] = M[1][1];
        D[1][1] = M[1][0];
        return D + C;
    }
};

namespace detail {

inline double factorial(int j)
{
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return f;
}

inline Mat2 contact_term(const SpectralDataset& ds, cplx lambda, int l, int jOrder)
{
    Mat2 C{};
    double h = ds.grid.h, R = ds.grid.R;
    if (jOrder == 0) {
        double c = 1.0 / h - 1.0 / R + h * l * (l + 1) / (2.0 * R * R);
        C[0][0] = c;
        C[0][1] = h / 2;
        C[1][1] = c;
        C[1][0] = -1.0 / (h * h * h) + (h / 2) * (lambda - ds.potential(R));
    } else if (jOrder == 1) {
        C[1][0] = h / 2;
    }
    return C;
}

} // namespace detail

inline DtnBlock dtn_block(const SpectralDataset& ds, cplx lambda, int l, int jOrder = 0,
                          const Window& window = Window::all(), int m = 0)
{
    require(l >= 0 && l <= ds.lmax, "dtn_block: degree outside the dataset");
    require(std::abs(m) <= l, "dtn_block: need |m| <= l");
    require(jOrder >= 0, "dtn_block: jOrder must be >= 0");
    using LC = std::complex<long double>;
    const auto& cs = ds.channels[std::size_t(l)];
    const long double R = ds.grid.R;
    const long double fact = detail::factorial(jOrder);
    const LC lam(lambda.real(), lambda.imag());
    const double guard = 1e-6 * (1.0 + std::abs(lambda));
    LC s11 = 0, s12 = 0, s22 = 0;
    double nearest = std::numeric_limits<double>::infinity(), nearestLam = 0.0;
    for (int q = 1; q <= cs.size(); ++q) {
        if (window.kind != Window::Kind::All && !window.contains(ds.rank_of(l, m, q))) continue;
        double lq = cs.lambda[std::size_t(q - 1)];
        double dist = std::abs(cplx(lq) - lambda);
        if (dist < nearest) {
            nearest = dist;
            nearestLam = lq;
        }
        LC w = fact / std::pow(LC(lq) - lam, jOrder + 1);
        long double A = R * cs.aTrace[std::size_t(q - 1)], B = R * cs.bTrace[std::size_t(q - 1)];
        s11 += A * A * w;
        s12 += A * B * w;
        s22 += B * B * w;
    }
    if (nearest < guard && lambda.imag() < 1.0)
        throw PoleProximityError("dtn_block: lambda too close to eigenvalue " + std::to_string(nearestLam), nearestLam);
    DtnBlock blk;
    blk.ell = l;
    blk.m = m;
    blk.lambda = lambda;
    blk.jOrder = jOrder;
    blk.window = window;
    blk.M[0][0] = cplx(s11);
    blk.M[0][1] = blk.M[1][0] = cplx(s12);
    blk.M[1][1] = cplx(s22);
    if (window.has_contact()) blk.C = detail::contact_term(ds, lambda, l, jOrder);
    return blk;
}

// Fourth root with Im >= 0 for any nonzero lambda (no branch-cut check).
inline cplx any_fourth_root(cplx lambda)
{
    cplx k = std::pow(lambda, 0.25);
    if (k.imag() < 0.0) k *= cplx(0.0, 1.0);
    return k;
}

// Exact V = 0 block from the regular solutions j_l(kappa r), j_l(i kappa r),
// kappa^4 = lambda, in output layout (F, G) -> (out1, out2).
inline Mat2 analytic_dtn_v0(cplx lambda, int l, double R)
{
    require(lambda != cplx(0.0), "analytic_dtn_v0: lambda = 0 needs the polynomial basis");
    cplx k = any_fourth_root(lambda);
    cplx ik = cplx(0.0, 1.0) * k;
    cplx ja = sph_bessel_j(l, k * R), jb = sph_bessel_j(l, ik * R);
    cplx da = k * sph_bessel_jp(l, k * R), db = ik * sph_bessel_jp(l, ik * R);
    cplx k2 = k * k;
    // u = alpha j(kr) + beta j(ikr); Delta u = -k^2 alpha j(kr) + k^2 beta j(ikr).
    cplx m00 = ja, m01 = jb, m10 = -k2 * ja, m11 = k2 * jb;
    cplx det = m00 * m11 - m01 * m10;
    double scale = std::abs(m00 * m11) + std::abs(m01 * m10);
    if (std::abs(det) <= 1e-13 * scale)
        throw PreconditionError("analytic_dtn_v0: lambda is a Navier eigenvalue of degree " + std::to_string(l));
    cplx i00 = m11 / det, i01 = -m01 / det, i10 = -m10 / det, i11 = m00 / det;
    cplx o00 = da, o01 = db, o10 = -k2 * da, o11 = k2 * db;
    Mat2 D;
    D[0][0] = o00 * i00 + o01 * i10;
    D[0][1] = o00 * i01 + o01 * i11;
    D[1][0] = o10 * i00 + o11 * i10;
    D[1][1] = o10 * i01 + o11 * i11;
    return D;
}

// Sobolev multiplier (1 + l(l+1)/R^2)^{s/2} on degree-l coefficients.
inline double sobolev_weight(int l, double R, double s)
{
    return std::pow(1.0 + l * (l + 1.0) / (R * R), 0.5 * s);
}

struct DtnDiffNorms {
    double norm1 = 0.0; // Lambda_{.,1}: H^{3/2} x H^{-1/2} -> H^{t1}
    double norm2 = 0.0; // Lambda_{.,2}: H^{3/2} x H^{-1/2} -> H^{t2}
};

inline DtnDiffNorms dtn_diff_norm(const SpectralDataset& ds1, const SpectralDataset& ds2, cplx lambda, double t1,
                                  double t2, int lmax, int jOrder = 0)
{
    require(t1 >= -1.5 && t1 <= 0.5, "dtn_diff_norm: t1 must be in [-3/2, 1/2]");
    require(t2 >= -3.5 && t2 <= -1.5, "dtn_diff_norm: t2 must be in [-7/2, -3/2]");
    require(ds1.grid == ds2.grid, "dtn_diff_norm: datasets on different grids");
    require(lmax <= std::min(ds1.lmax, ds2.lmax), "dtn_diff_norm: lmax exceeds the datasets");
    double Q = sup_bound(ds1.potentialSamples) + sup_bound(ds2.potentialSamples);
    require(std::abs(lambda) >= 2.0 * Q, "dtn_diff_norm: need |lambda| >= 2Q");
    double R = ds1.grid.R;
    DtnDiffNorms out;
    for (int l = 0; l <= lmax; ++l) {
        Mat2 d = dtn_block(ds1, lambda, l, jOrder).response() - dtn_block(ds2, lambda, l, jOrder).response();
        double wf = sobolev_weight(l, R, 1.5), wg = sobolev_weight(l, R, -0.5);
        double n1 = sobolev_weight(l, R, t1) * std::hypot(std::abs(d[0][0]) / wf, std::abs(d[0][1]) / wg);
        double n2 = sobolev_weight(l, R, t2) * std::hypot(std::abs(d[1][0]) / wf, std::abs(d[1][1]) / wg);
        out.norm1 = std::max(out.norm1, n1);
        out.norm2 = std::max(out.norm2, n2);
    }
    return out;
}

struct TruncationSpec {
    int E = 0;
    double cGap = 0.5;
    int EOfLambda = 0;
};

struct TruncationWindows {
    TruncationSpec spec;
    Window hat, tilde, tail;
};

// E(lambda) = max{j >= E : cGap lambda_{j+1} < Re lambda}.
inline TruncationWindows split_truncation(const SpectralDataset& ds, TruncationSpec spec, cplx lambda)
{
    require(spec.E >= 0, "split_truncation: E must be >= 0");
    require(spec.cGap > 0.0 && spec.cGap < 1.0, "split_truncation: cGap must be in (0, 1)");
    require(spec.E < ds.size(), "split_truncation: E beyond the dataset");
    require(lambda.real() > spec.cGap * ds.mode(spec.E + 1).lambda,
            "split_truncation: Re lambda too small, E(lambda) undefined");
    int j = spec.E;
    while (j + 2 <= ds.size() && spec.cGap * ds.mode(j + 2).lambda < lambda.real()) ++j;
    require(j + 2 <= ds.size(), "split_truncation: E(lambda) runs past the complete part of the dataset");
    spec.EOfLambda = j;
    TruncationWindows w;
    w.spec = spec;
    w.hat = {Window::Kind::Hat, spec.E, spec.EOfLambda};
    w.tilde = {Window::Kind::Tilde, spec.E, spec.EOfLambda};
    w.tail = {Window::Kind::Tail, spec.E, spec.EOfLambda};
    return w;
}

// sum_{k<m} (lambda - lambdaT)^k / k! Lambda^{(k)}(lambdaT), lambdaT = lambda + T.
inline Mat2 taylor_extension(const SpectralDataset& ds, cplx lambda, double T, int m, int l,
                             const Window& window = Window::all())
{
    require(m >= 2, "taylor_extension: m must be >= 2");
    require(T > 0.0, "taylor_extension: T must be positive");
    cplx lt = lambda + T;
    Mat2 sum{};
    cplx pw = 1.0;
    for (int k = 0; k < m; ++k) {
        sum = sum + (pw / detail::factorial(k)) * dtn_block(ds, lt, l, k, window).response();
        pw *= (lambda - lt);
    }
    return sum;
}

} // namespace bispec

#endif // BISPEC_DTN_HPP
