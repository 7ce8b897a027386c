#ifndef BISPEC_EIG_HPP
#define BISPEC_EIG_HPP

// Symmetric eigensolvers and the spectral dataset of the Navier problem.
//
// Channel spectra are computed in long double: the pentadiagonal T^2 + V is
// reduced to tridiagonal form by Givens bulge chasing and diagonalized by
// implicit QL, and only the rows of the eigenvector matrix that the boundary
// traces need are accumulated. Full profiles are produced on request.

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "radial_op.hpp"

namespace bispec {

template <class Real>
struct EigenSystem {
    std::vector<Real> values;  // ascending
    Matrix<Real> vectors;      // column j belongs to values[j]
};

namespace detail {

template <class Real>
Real hypot_(Real a, Real b)
{
    using std::abs, std::sqrt;
    Real x = abs(a), y = abs(b);
    if (x < y) std::swap(x, y);
    if (x == Real(0)) return Real(0);
    Real t = y / x;
    return x * sqrt(Real(1) + t * t);
}

// Implicit-shift QL on the tridiagonal (d, e), e[i] coupling i and i+1.
// Rotations are applied to the columns of every row of z (z may hold any
// subset of rows of the transformation). On return d holds the eigenvalues
// in no particular order.
template <class Real>
void tql_implicit(std::vector<Real>& d, std::vector<Real>& e, Matrix<Real>* z)
{
    using std::abs;
    int n = int(d.size());
    e.resize(std::size_t(n), Real(0));
    if (n > 0) e[std::size_t(n - 1)] = Real(0);
    const Real eps = std::numeric_limits<Real>::epsilon();
    long budget = 30L * std::max(n, 1);
    for (int l = 0; l < n; ++l) {
        int m;
        for (;;) {
            for (m = l; m < n - 1; ++m) {
                Real dd = abs(d[std::size_t(m)]) + abs(d[std::size_t(m + 1)]);
                if (abs(e[std::size_t(m)]) <= eps * dd) break;
            }
            if (m == l) break;
            if (--budget < 0) throw ConvergenceError("tql_implicit: no convergence within 30*N iterations");
            Real g = (d[std::size_t(l + 1)] - d[std::size_t(l)]) / (Real(2) * e[std::size_t(l)]);
            Real r = hypot_(g, Real(1));
            g = d[std::size_t(m)] - d[std::size_t(l)] + e[std::size_t(l)] / (g + (g >= 0 ? abs(r) : -abs(r)));
            Real s = 1, c = 1, p = 0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                Real f = s * e[std::size_t(i)], b = c * e[std::size_t(i)];
                r = hypot_(f, g);
                e[std::size_t(i + 1)] = r;
                if (r == Real(0)) {
                    d[std::size_t(i + 1)] -= p;
                    e[std::size_t(m)] = 0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[std::size_t(i + 1)] - p;
                r = (d[std::size_t(i)] - g) * s + Real(2) * c * b;
                p = s * r;
                d[std::size_t(i + 1)] = g + p;
                g = c * r - b;
                if (z) {
                    for (int k = 0; k < z->rows; ++k) {
                        Real zf = (*z)(k, i + 1);
                        (*z)(k, i + 1) = s * (*z)(k, i) + c * zf;
                        (*z)(k, i) = c * (*z)(k, i) - s * zf;
                    }
                }
            }
            if (underflow) continue;
            d[std::size_t(l)] -= p;
            e[std::size_t(l)] = g;
            e[std::size_t(m)] = 0;
        }
    }
}

// Sort eigenvalues ascending and permute the columns of z alongside.
template <class Real>
void sort_eigen(std::vector<Real>& d, Matrix<Real>* z)
{
    std::vector<int> idx(d.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return d[std::size_t(a)] < d[std::size_t(b)]; });
    std::vector<Real> ds(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) ds[j] = d[std::size_t(idx[j])];
    d = std::move(ds);
    if (z) {
        Matrix<Real> zs(z->rows, z->cols);
        for (int k = 0; k < z->rows; ++k)
            for (int j = 0; j < z->cols; ++j) zs(k, j) = (*z)(k, idx[std::size_t(j)]);
        *z = std::move(zs);
    }
}

// Householder reduction A = Q T Q^T, Q accumulated in q.
template <class Real>
void householder_tridiagonalize(Matrix<Real>& a, std::vector<Real>& d, std::vector<Real>& e, Matrix<Real>& q)
{
    using std::sqrt;
    int n = a.rows;
    q = Matrix<Real>::identity(n);
    std::vector<Real> v(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int k = 0; k + 2 < n; ++k) {
        Real sigma = 0;
        for (int i = k + 1; i < n; ++i) sigma += a(i, k) * a(i, k);
        if (sigma == Real(0)) continue;
        Real x0 = a(k + 1, k);
        Real alpha = x0 >= 0 ? -sqrt(sigma) : sqrt(sigma);
        Real vnorm2 = sigma - x0 * x0 + (x0 - alpha) * (x0 - alpha);
        if (vnorm2 == Real(0)) continue;
        Real vn = sqrt(vnorm2);
        for (int i = k + 1; i < n; ++i) v[std::size_t(i)] = a(i, k) / vn;
        v[std::size_t(k + 1)] = (x0 - alpha) / vn;
        // p = A v on the trailing block, w = 2 (p - (v.p) v).
        Real vp = 0;
        for (int i = k + 1; i < n; ++i) {
            Real s = 0;
            for (int j = k + 1; j < n; ++j) s += a(i, j) * v[std::size_t(j)];
            p[std::size_t(i)] = s;
            vp += v[std::size_t(i)] * s;
        }
        for (int i = k + 1; i < n; ++i) w[std::size_t(i)] = Real(2) * (p[std::size_t(i)] - vp * v[std::size_t(i)]);
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a(i, j) -= v[std::size_t(i)] * w[std::size_t(j)] + w[std::size_t(i)] * v[std::size_t(j)];
        a(k + 1, k) = a(k, k + 1) = alpha;
        for (int i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0;
        for (int r = 0; r < n; ++r) {
            Real s = 0;
            for (int j = k + 1; j < n; ++j) s += q(r, j) * v[std::size_t(j)];
            s *= 2;
            for (int j = k + 1; j < n; ++j) q(r, j) -= s * v[std::size_t(j)];
        }
    }
    d.assign(std::size_t(n), Real(0));
    e.assign(std::size_t(n), Real(0));
    for (int i = 0; i < n; ++i) {
        d[std::size_t(i)] = a(i, i);
        if (i + 1 < n) e[std::size_t(i)] = a(i, i + 1);
    }
}

// Band-limited Givens rotation on rows and columns p < q of a dense
// symmetric a, touching indices [lo, hi] only. Chosen to zero a(q, t).
template <class Real>
void band_rotate(Matrix<Real>& a, int p, int q, int t, int lo, int hi, Matrix<Real>& rows)
{
    Real x = a(p, t), y = a(q, t);
    Real r = hypot_(x, y);
    if (r == Real(0)) return;
    Real c = x / r, s = y / r;
    for (int k = lo; k <= hi; ++k) {
        Real ap = a(p, k), aq = a(q, k);
        a(p, k) = c * ap + s * aq;
        a(q, k) = -s * ap + c * aq;
    }
    for (int k = lo; k <= hi; ++k) {
        Real ap = a(k, p), aq = a(k, q);
        a(k, p) = c * ap + s * aq;
        a(k, q) = -s * ap + c * aq;
    }
    a(q, t) = a(t, q) = 0;
    for (int k = 0; k < rows.rows; ++k) {
        Real ap = rows(k, p), aq = rows(k, q);
        rows(k, p) = c * ap + s * aq;
        rows(k, q) = -s * ap + c * aq;
    }
}

} // namespace detail

// Dense symmetric eigensolver: Householder tridiagonalization, then implicit QL.
template <class Real>
EigenSystem<Real> solve_symmetric(const Matrix<Real>& m)
{
    using std::abs;
    require(m.rows == m.cols, "solve_symmetric: matrix must be square");
    int n = m.rows;
    Real scale = 0;
    for (Real v : m.a) scale = std::max(scale, Real(abs(v)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            require(abs(m(i, j) - m(j, i)) <= Real(1e-12) * std::max(scale, Real(1)), "solve_symmetric: matrix is not symmetric");
    Matrix<Real> a = m;
    EigenSystem<Real> es;
    std::vector<Real> e;
    detail::householder_tridiagonalize(a, es.values, e, es.vectors);
    detail::tql_implicit(es.values, e, &es.vectors);
    detail::sort_eigen(es.values, &es.vectors);
    return es;
}

// Eigen-decomposition of a symmetric pentadiagonal matrix given by bands.
// Returns all eigenvalues ascending; `rows` lists which rows of the
// eigenvector matrix to return (all rows when empty).
template <class Real>
EigenSystem<Real> solve_pentadiagonal(const std::vector<Real>& b0, const std::vector<Real>& b1,
                                      const std::vector<Real>& b2, const std::vector<int>& rows = {})
{
    int n = int(b0.size());
    Matrix<Real> a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = b0[std::size_t(i)];
        if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = b1[std::size_t(i)];
        if (i + 2 < n) a(i, i + 2) = a(i + 2, i) = b2[std::size_t(i)];
    }
    Matrix<Real> z;
    if (rows.empty()) {
        z = Matrix<Real>::identity(n);
    } else {
        z = Matrix<Real>(int(rows.size()), n);
        for (std::size_t k = 0; k < rows.size(); ++k) z(int(k), rows[k]) = 1;
    }
    for (int j = 0; j + 2 < n; ++j) {
        int t = j, p = j + 1, q = j + 2;
        while (q < n) {
            if (a(q, t) != Real(0))
                detail::band_rotate(a, p, q, t, std::max(0, t), std::min(n - 1, q + 3), z);
            t = p;
            p = q + 1;
            q = q + 2;
        }
    }
    EigenSystem<Real> es;
    std::vector<Real> e(std::size_t(n), Real(0));
    es.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        es.values[std::size_t(i)] = a(i, i);
        if (i + 1 < n) e[std::size_t(i)] = a(i, i + 1);
    }
    detail::tql_implicit(es.values, e, &z);
    detail::sort_eigen(es.values, &z);
    es.vectors = std::move(z);
    return es;
}

// Radial factors of d_nu phi and d_nu(Delta phi) at r = R for phi = (u/r) Y_lm,
// u unit-normalized in the plain vector norm. Uses the summation-by-parts
// boundary stencil u'(R) ~ -u_N/h, which is second order for Navier modes
// (u''(R) = 0) and consistent with the discrete Green identity.
struct Traces {
    double a = 0.0;
    double b = 0.0;
};

template <class Real>
Traces traces_from_tail(Real uPrev, Real uLast, const RadialGrid& g, int l)
{
    using std::sqrt;
    Real h = Real(g.R) / Real(g.N + 1);
    Real sh = sqrt(h);
    Real vN = uLast / sh, vN1 = uPrev / sh;
    Real rN = Real(g.N) * h;
    Real dN = Real(2) / (h * h) + Real(l) * Real(l + 1) / (rN * rN);
    Real tvN = dN * vN - vN1 / (h * h);
    Real R = Real(g.R);
    return {double(-vN / (h * R)), double(tvN / (h * R))};
}

inline Traces boundary_traces(const std::vector<double>& u, const RadialGrid& g, const Tridiagonal<double>& T)
{
    require(int(u.size()) == g.N && T.size() == g.N, "boundary_traces: size mismatch");
    double sh = std::sqrt(g.h);
    int n = g.N;
    double wN = T.diag[std::size_t(n - 1)] * u[std::size_t(n - 1)] + T.off[std::size_t(n - 2)] * u[std::size_t(n - 2)];
    return {-u[std::size_t(n - 1)] / sh / (g.h * g.R), wN / sh / (g.h * g.R)};
}

// All radial modes of one degree.
struct ChannelSpectrum {
    int ell = 0;
    std::vector<double> lambda, aTrace, bTrace;
    std::optional<Matrix<double>> profiles; // N x N, column q-1 is mode q

    int size() const { return int(lambda.size()); }
};

inline ChannelSpectrum solve_channel(const RadialGrid& g, int l, const std::vector<double>& V, bool wantProfiles = false)
{
    using Real = long double;
    require(int(V.size()) == g.N, "solve_channel: potential not sampled on this grid");
    std::vector<Real> b0, b1, b2;
    navier_bands<Real>(g, l, V, b0, b1, b2);
    int n = g.N;
    std::vector<int> rows;
    if (!wantProfiles) rows = {n - 2, n - 1};
    EigenSystem<Real> es;
    try {
        es = solve_pentadiagonal<Real>(b0, b1, b2, rows);
    } catch (const ConvergenceError& ex) {
        throw ConvergenceError("channel l=" + std::to_string(l) + ": " + ex.what());
    }
    ChannelSpectrum cs;
    cs.ell = l;
    cs.lambda.resize(static_cast<std::size_t>(n));
    cs.aTrace.resize(static_cast<std::size_t>(n));
    cs.bTrace.resize(static_cast<std::size_t>(n));
    int rPrev = wantProfiles ? n - 2 : 0, rLast = wantProfiles ? n - 1 : 1;
    if (wantProfiles) cs.profiles = Matrix<double>(n, n);
    for (int q = 0; q < n; ++q) {
        Traces t = traces_from_tail<Real>(es.vectors(rPrev, q), es.vectors(rLast, q), g, l);
        double sign = t.a < 0.0 ? -1.0 : 1.0;
        cs.lambda[std::size_t(q)] = double(es.values[std::size_t(q)]);
        cs.aTrace[std::size_t(q)] = sign * t.a;
        cs.bTrace[std::size_t(q)] = sign * t.b;
        if (wantProfiles)
            for (int i = 0; i < n; ++i) (*cs.profiles)(i, q) = sign * double(es.vectors(i, q));
    }
    return cs;
}

struct EigenMode {
    int ell = 0, m = 0, q = 1;
    double lambda = 0.0;
    double aTrace = 0.0;
    double bTrace = 0.0;
};

struct DatasetOptions {
    int threads = 1;
    bool profiles = false;
};

// Global spectrum plus complete per-channel spectra.
struct SpectralDataset {
    RadialGrid grid;
    RadialPotential potential;
    std::vector<double> potentialSamples;
    int lmax = 0;
    int kPerChannel = 0;
    double lambdaComplete = 0.0;
    std::vector<ChannelSpectrum> channels; // all N modes of every l <= lmax
    std::vector<EigenMode> modes;          // sorted, truncated below lambdaComplete

    int size() const { return int(modes.size()); }
    const EigenMode& mode(int k) const { return modes[std::size_t(k - 1)]; } // k starts at 1

    // Radial profile u of a mode; requires a dataset built with profiles.
    std::vector<double> profile(const EigenMode& md) const
    {
        const auto& cs = channels[std::size_t(md.ell)];
        require(cs.profiles.has_value(), "dataset was built without profiles");
        std::vector<double> u(static_cast<std::size_t>(grid.N));
        for (int i = 0; i < grid.N; ++i) u[std::size_t(i)] = (*cs.profiles)(i, md.q - 1);
        return u;
    }

    // Global position (1-based) of each (l, m, q) listed in `modes`, 0 when absent.
    int rank_of(int l, int m, int q) const
    {
        build_rank();
        return rank_[std::size_t(rank_offset_[std::size_t(l)] + (m + l) * grid.N + (q - 1))];
    }

private:
    void build_rank() const
    {
        if (!rank_.empty()) return;
        rank_offset_.assign(std::size_t(lmax + 2), 0);
        for (int l = 0; l <= lmax; ++l) rank_offset_[std::size_t(l + 1)] = rank_offset_[std::size_t(l)] + (2 * l + 1) * grid.N;
        rank_.assign(std::size_t(rank_offset_.back()), 0);
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const auto& md = modes[k];
            rank_[std::size_t(rank_offset_[std::size_t(md.ell)] + (md.m + md.ell) * grid.N + (md.q - 1))] = int(k + 1);
        }
    }
    mutable std::vector<int> rank_, rank_offset_;
};

inline SpectralDataset build_dataset(const RadialPotential& V, const RadialGrid& g, int lmax, int kPerChannel,
                                     DatasetOptions opt = {})
{
    require(lmax >= 10 && lmax <= kMaxDegree, "build_dataset: lmax must be in [10, " + std::to_string(kMaxDegree) + "]");
    require(kPerChannel >= 10 && kPerChannel <= g.N, "build_dataset: kPerChannel must be in [10, N]");
    SpectralDataset ds;
    ds.grid = g;
    ds.potential = V;
    ds.potentialSamples = sample_potential(V, g);
    ds.lmax = lmax;
    ds.kPerChannel = kPerChannel;
    ds.channels.resize(static_cast<std::size_t>(lmax + 1));

    int nt = std::max(1, std::min(opt.threads, lmax + 1));
    auto work = [&](int first) {
        for (int l = first; l <= lmax; l += nt)
            ds.channels[std::size_t(l)] = solve_channel(g, l, ds.potentialSamples, opt.profiles);
    };
    if (nt == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(static_cast<std::size_t>(nt));
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                try { work(t); } catch (...) { errs[std::size_t(t)] = std::current_exception(); }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    double lc = ds.channels[std::size_t(lmax)].lambda[0];
    for (int l = 0; l < lmax; ++l)
        if (kPerChannel < g.N) lc = std::min(lc, ds.channels[std::size_t(l)].lambda[std::size_t(kPerChannel)]);
    ds.lambdaComplete = lc;

    for (int l = 0; l <= lmax; ++l) {
        const auto& cs = ds.channels[std::size_t(l)];
        for (int q = 1; q <= kPerChannel; ++q) {
            double lam = cs.lambda[std::size_t(q - 1)];
            if (lam >= lc) break;
            for (int m = -l; m <= l; ++m)
                ds.modes.push_back({l, m, q, lam, cs.aTrace[std::size_t(q - 1)], cs.bTrace[std::size_t(q - 1)]});
        }
    }
    std::sort(ds.modes.begin(), ds.modes.end(), [](const EigenMode& x, const EigenMode& y) {
        return std::tie(x.lambda, x.ell, x.m) < std::tie(y.lambda, y.ell, y.m);
    });
    return ds;
}

} // namespace bispec

#endif // BISPEC_EIG_HPP
