#ifndef BISPEC_INVERSION_HPP
#define BISPEC_INVERSION_HPP

// Inverse pipeline: plane-wave geometry, Born samples of (V1 - V2)^, radial
// low-pass reconstruction, spectral-data discrepancies and the stability sweep.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eig.hpp"
#include "errors.hpp"
#include "scattering.hpp"
#include "stats.hpp"
#include "weyl.hpp"

namespace bispec {

struct IsozakiGeometry {
    Vec3 xi{}, eta{};
    double zeta = 0.0;
    double c = 0.0;
    Vec3 omega{}, theta{};
    cplx lambda = 0.0;
};

// theta = c eta + xi/(2 zeta), omega = c eta - xi/(2 zeta), c = sqrt(1 - |xi|^2/(4 zeta^2)).
// eta: the first coordinate axis not parallel to xi (or etaSeed when given),
// orthogonalized against xi.
inline IsozakiGeometry isozaki_geometry(const Vec3& xi, double zeta, std::optional<Vec3> etaSeed = std::nullopt)
{
    require(zeta >= 1.0, "isozaki_geometry: need zeta >= 1");
    double nx = norm(xi);
    if (!(nx < 2.0 * zeta))
        throw PreconditionError("isozaki_geometry: |xi| = " + std::to_string(nx) + " needs zeta > " +
                                std::to_string(nx / 2.0));
    IsozakiGeometry g;
    g.xi = xi;
    g.zeta = zeta;
    g.c = std::sqrt(1.0 - nx * nx / (4.0 * zeta * zeta));
    auto orth = [&](Vec3 v) -> std::optional<Vec3> {
        if (nx > 0.0) v = v - (dot(v, xi) / (nx * nx)) * xi;
        double n = norm(v);
        if (n < 1e-8) return std::nullopt;
        return (1.0 / n) * v;
    };
    std::optional<Vec3> eta;
    if (etaSeed) eta = orth(*etaSeed);
    for (int i = 0; i < 3 && !eta; ++i) {
        Vec3 e{};
        e[std::size_t(i)] = 1.0;
        eta = orth(e);
    }
    g.eta = *eta;
    Vec3 half = (0.5 / zeta) * xi;
    g.theta = g.c * g.eta + half;
    g.omega = g.c * g.eta - half;
    g.lambda = std::pow(cplx(zeta, 1.0), 4);
    return g;
}

// -(S1 - S2) on the Isozaki geometry; approximates (V1 - V2)^(xi + i xi/zeta).
inline cplx sample_vhat_difference(const SpectralDataset& ds1, const SpectralDataset& ds2, const Vec3& xi,
                                   double zeta, Grouping grouping = Grouping::SqrtLambdaOnFirstOnly, int lmax = 0)
{
    require(ds1.grid == ds2.grid, "sample_vhat_difference: datasets on different grids");
    IsozakiGeometry g = isozaki_geometry(xi, zeta);
    cplx kappa = fourth_root(g.lambda);
    int L = scattering_lmax(ds1, kappa, lmax);
    L = scattering_lmax(ds2, kappa, L);
    auto [a1, b1] = scattering_integrals(ds1, kappa, g.omega, g.theta, L);
    auto [a2, b2] = scattering_integrals(ds2, kappa, g.omega, g.theta, L);
    return -(combine(grouping, kappa, a1, b1) - combine(grouping, kappa, a2, b2));
}

// (V1 - V2)^ at the complex frequency xi + i xi/zeta.
inline cplx vhat_difference(const RadialPotential& V1, const RadialPotential& V2, const Vec3& xi, double zeta, double R)
{
    cplx s(1.0, 1.0 / zeta);
    return born_volume_term(V1 - V2, {s * xi[0], s * xi[1], s * xi[2]}, R);
}

// ||V||_{L^2(B_R)}.
inline double l2_norm(const RadialPotential& V, double R, int nodes = 256)
{
    GaussRule g = gauss_legendre(nodes, 0.0, R);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        double r = g.nodes[i], v = V(r);
        s += g.weights[i] * v * v * r * r;
    }
    return std::sqrt(4.0 * std::numbers::pi * s);
}

enum class CutoffMode { Compliant, Diagnostic };

inline const char* cutoff_name(CutoffMode c) { return c == CutoffMode::Compliant ? "compliant" : "diagnostic"; }

struct Reconstruction {
    CutoffMode mode = CutoffMode::Compliant;
    double cutoff = 0.0;
    std::vector<double> rho;
    std::vector<cplx> samples;
    std::vector<double> r, W, exact; // profile on a uniform radial grid
    double reconError = 0.0;         // ||W - (V1 - V2)||_{L^2(B_R)}
    double l2Diff = 0.0;             // ||V1 - V2||_{L^2(B_R)}
    double relError = 0.0;
    bool tailDominated = false;      // compliant cutoff, error set by the missing high frequencies
};

struct ReconstructOptions {
    int nXi = 32;
    CutoffMode mode = CutoffMode::Compliant;
    double diagnosticCutoff = 8.0;
    Vec3 direction{1.0, 0.0, 0.0};
    int profilePoints = 101;
    Grouping grouping = Grouping::SqrtLambdaOnFirstOnly;
};

// W(r) = (1/(2 pi^2)) int_0^cut What(rho) rho sin(rho r)/r drho with What from
// Born samples along a fixed direction; compliant cutoff zeta^{1/6}.
inline Reconstruction reconstruct_difference(const SpectralDataset& ds1, const SpectralDataset& ds2, double zeta,
                                             const ReconstructOptions& opt = {})
{
    require(opt.nXi >= 16, "reconstruct_difference: need at least 16 radial samples");
    require(opt.nXi <= 512, "reconstruct_difference: at most 512 radial samples");
    Reconstruction rec;
    rec.mode = opt.mode;
    rec.cutoff = opt.mode == CutoffMode::Compliant ? std::pow(zeta, 1.0 / 6.0) : opt.diagnosticCutoff;
    require(rec.cutoff > 0.0 && rec.cutoff < 2.0 * zeta, "reconstruct_difference: cutoff must lie in (0, 2 zeta)");
    Vec3 dir = normalized(opt.direction);
    GaussRule gq = gauss_legendre(opt.nXi, 0.0, rec.cutoff);
    rec.rho = gq.nodes;
    for (double rho : gq.nodes) rec.samples.push_back(sample_vhat_difference(ds1, ds2, rho * dir, zeta, opt.grouping));

    auto W = [&](double r) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < gq.nodes.size(); ++j) {
            double rho = gq.nodes[j];
            double kern = r > 0.0 ? rho * std::sin(rho * r) / r : rho * rho;
            s += gq.weights[j] * rec.samples[j] * kern;
        }
        return (s / (2.0 * std::numbers::pi * std::numbers::pi)).real();
    };
    RadialPotential diff = ds1.potential - ds2.potential;
    double R = ds1.grid.R;
    GaussRule gr = gauss_legendre(256, 0.0, R);
    double e2 = 0.0;
    for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
        double r = gr.nodes[i], d = W(r) - diff(r);
        e2 += gr.weights[i] * d * d * r * r;
    }
    rec.reconError = std::sqrt(4.0 * std::numbers::pi * e2);
    rec.l2Diff = l2_norm(diff, R);
    rec.relError = rec.l2Diff > 0.0 ? rec.reconError / rec.l2Diff : 0.0;
    rec.tailDominated = opt.mode == CutoffMode::Compliant;
    for (int i = 0; i < opt.profilePoints; ++i) {
        double r = R * i / std::max(1, opt.profilePoints - 1);
        rec.r.push_back(r);
        rec.W.push_back(W(r));
        rec.exact.push_back(diff(r));
    }
    return rec;
}

enum class Pairing { Channel, GlobalIndex };

inline const char* pairing_name(Pairing p) { return p == Pairing::Channel ? "channel" : "globalIndex"; }

struct Discrepancy {
    double eps0 = 0.0, eps1 = 0.0, eps2 = 0.0, eps = 0.0;
    double eps0TailBound = 0.0; // sup over k > Kmax bounded by max |V1 - V2| on the grid
    double eps1TailBound = 0.0;
    double eps2TailBound = 0.0;
};

inline Discrepancy spectral_discrepancy(const SpectralDataset& ds1, const SpectralDataset& ds2, int E, int m, int Kmax,
                                        Pairing pairing = Pairing::Channel)
{
    require(ds1.grid == ds2.grid, "spectral_discrepancy: datasets on different grids");
    require(m >= 2, "spectral_discrepancy: m must be >= 2");
    require(E >= 0, "spectral_discrepancy: E must be >= 0");
    require(Kmax >= 1, "spectral_discrepancy: Kmax must be >= 1");
    require(Kmax + E <= std::min(ds1.size(), ds2.size()),
            "spectral_discrepancy: Kmax + E exceeds the complete part of the datasets");
    double R = ds1.grid.R;
    Discrepancy d;
    for (int k = 1; k <= Kmax; ++k) {
        const EigenMode& x = ds1.mode(k + E);
        double lam2, a2, b2;
        bool sameHarmonic = true;
        if (pairing == Pairing::Channel) {
            const auto& cs = ds2.channels[std::size_t(x.ell)];
            lam2 = cs.lambda[std::size_t(x.q - 1)];
            a2 = cs.aTrace[std::size_t(x.q - 1)];
            b2 = cs.bTrace[std::size_t(x.q - 1)];
        } else {
            const EigenMode& y = ds2.mode(k + E);
            lam2 = y.lambda;
            a2 = y.aTrace;
            b2 = y.bTrace;
            sameHarmonic = y.ell == x.ell && y.m == x.m;
        }
        double w = std::pow(double(k), -4.0 * m / 3.0);
        d.eps0 = std::max(d.eps0, std::abs(x.lambda - lam2));
        if (sameHarmonic) {
            d.eps1 += w * R * std::abs(x.aTrace - a2);
            d.eps2 += w * R * std::abs(x.bTrace - b2);
        } else {
            d.eps1 += w * R * std::hypot(x.aTrace, a2);
            d.eps2 += w * R * std::hypot(x.bTrace, b2);
        }
    }
    d.eps = d.eps0 + d.eps1 + d.eps2;

    for (std::size_t i = 0; i < ds1.potentialSamples.size(); ++i)
        d.eps0TailBound = std::max(d.eps0TailBound, std::abs(ds1.potentialSamples[i] - ds2.potentialSamples[i]));
    // Tails: |a_k| <= C_A lambda_k^{1/2}, |b_k| <= C_B lambda_k, lambda_k <= E2 k^{4/3}.
    auto t1 = trace_bound_check(ds1), t2 = trace_bound_check(ds2);
    double E2 = 0.0;
    for (const auto* ds : {&ds1, &ds2})
        for (int k = 10; k <= ds->size(); ++k) E2 = std::max(E2, ds->mode(k).lambda / std::pow(double(k), 4.0 / 3.0));
    double CA = std::max(t1.maxRatioA, t2.maxRatioA), CB = std::max(t1.maxRatioB, t2.maxRatioB);
    double K = Kmax;
    double pA = 4.0 * m / 3.0 - 2.0 / 3.0, pB = 4.0 * m / 3.0 - 4.0 / 3.0;
    d.eps1TailBound = 2.0 * R * CA * std::sqrt(E2) * std::pow(K, 1.0 - pA) / (pA - 1.0);
    d.eps2TailBound = pB > 1.0 ? 2.0 * R * CB * E2 * std::pow(K, 1.0 - pB) / (pB - 1.0) : INFINITY;
    return d;
}

// delta = 1/(16 n (2 + m/sigma + m)), n = 3.
inline double theoretical_delta(int m, double sigma, int n = 3)
{
    require(n == 3, "theoretical_delta: only n = 3 is implemented");
    require(m >= 2, "theoretical_delta: m must be >= 2");
    require(sigma > 0.0 && sigma <= 0.25, "theoretical_delta: sigma must be in (0, 1/4]");
    return 1.0 / (16.0 * n * (2.0 + m / sigma + m));
}

struct StabilityReport {
    double amplitude = 0.0;
    double eps0 = 0.0, eps1 = 0.0, eps2 = 0.0, eps = 0.0;
    double l2Diff = 0.0;
    double reconError = 0.0;
    double deltaEmp = 0.0;
    int E = 0, m = 0, Kmax = 0;
};

struct SweepParams {
    RadialGrid grid;
    RadialPotential V1;
    RadialPotential bump; // V2 = V1 + amplitude * bump
    std::vector<double> amplitudes;
    int lmax = 20;
    int kPerChannel = 20;
    std::vector<int> offsets{0}; // E values, one sweep each over the same datasets
    int m = 2;
    int Kmax = 200;
    double zeta = 30.0;
    Pairing pairing = Pairing::Channel;
    ReconstructOptions recon;
    double sigma = 0.25;
    int threads = 1;
};

struct SweepResult {
    int E = 0;
    std::vector<StabilityReport> reports; // ordered by amplitude
    double deltaEmp = 0.0;
    double deltaTheory = 0.0;
    double envelopeC = 0.0;
    bool monotone = false;
    bool envelopeHolds = false;
    double eps0TailBound = 0.0; // at the largest amplitude
    double eps1TailBound = 0.0;
    double eps2TailBound = 0.0;
};

inline void validate_amplitudes(const std::vector<double>& amps)
{
    require(amps.size() >= 2, "stability sweep: need at least two amplitudes");
    for (double a : amps) require(a > 0.0 && a <= 0.2, "stability sweep: amplitudes must lie in (0, 0.2]");
    std::vector<double> s = amps;
    std::sort(s.begin(), s.end());
    require(std::adjacent_find(s.begin(), s.end()) == s.end(), "stability sweep: amplitudes must be distinct");
}

// One SweepResult per offset in p.offsets. The datasets need lmax large
// enough for the plane waves at p.zeta (see scattering_lmax).
inline std::vector<SweepResult> stability_sweep(const SweepParams& p)
{
    validate_amplitudes(p.amplitudes);
    require(!p.offsets.empty(), "stability sweep: no offsets");
    double deltaTheory = theoretical_delta(p.m, p.sigma);
    DatasetOptions opt;
    opt.threads = p.threads;
    SpectralDataset ds1 = build_dataset(p.V1, p.grid, p.lmax, p.kPerChannel, opt);
    std::vector<double> amps = p.amplitudes;
    std::sort(amps.begin(), amps.end());

    std::vector<SweepResult> out(p.offsets.size());
    for (std::size_t e = 0; e < p.offsets.size(); ++e) {
        out[e].E = p.offsets[e];
        out[e].deltaTheory = deltaTheory;
    }
    for (double a : amps) {
        RadialPotential V2 = p.V1 + p.bump.scaled(a);
        SpectralDataset ds2 = build_dataset(V2, p.grid, p.lmax, p.kPerChannel, opt);
        Reconstruction rec = reconstruct_difference(ds1, ds2, p.zeta, p.recon);
        double l2 = l2_norm(p.bump.scaled(a), p.grid.R);
        for (std::size_t e = 0; e < p.offsets.size(); ++e) {
            Discrepancy d = spectral_discrepancy(ds1, ds2, p.offsets[e], p.m, p.Kmax, p.pairing);
            StabilityReport r;
            r.amplitude = a;
            r.eps0 = d.eps0;
            r.eps1 = d.eps1;
            r.eps2 = d.eps2;
            r.eps = d.eps;
            r.l2Diff = l2;
            r.reconError = rec.reconError;
            r.E = p.offsets[e];
            r.m = p.m;
            r.Kmax = p.Kmax;
            out[e].reports.push_back(r);
            out[e].eps0TailBound = d.eps0TailBound;
            out[e].eps1TailBound = d.eps1TailBound;
            out[e].eps2TailBound = d.eps2TailBound;
        }
    }
    for (auto& res : out) {
        std::vector<double> eps, l2;
        for (const auto& r : res.reports) {
            eps.push_back(r.eps);
            l2.push_back(r.l2Diff);
        }
        res.deltaEmp = loglog_slope(eps, l2);
        for (auto& r : res.reports) r.deltaEmp = res.deltaEmp;
        res.monotone = true;
        for (std::size_t i = 1; i < eps.size(); ++i)
            if (!(eps[i] > eps[i - 1] && l2[i] > l2[i - 1])) res.monotone = false;
        for (std::size_t i = 0; i < eps.size(); ++i)
            res.envelopeC = std::max(res.envelopeC, l2[i] / std::pow(eps[i], res.deltaTheory));
        res.envelopeHolds = true;
        for (std::size_t i = 0; i < eps.size(); ++i)
            if (l2[i] > res.envelopeC * std::pow(eps[i], res.deltaTheory) * (1.0 + 1e-12)) res.envelopeHolds = false;
    }
    return out;
}

} // namespace bispec

#endif // BISPEC_INVERSION_HPP
