#ifndef BISPEC_WEYL_HPP
#define BISPEC_WEYL_HPP

// Weyl-law fit lambda_k ~ k^{4/3} and boundary-trace growth checks.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "eig.hpp"
#include "stats.hpp"

namespace bispec {

struct WeylReport {
    double fittedExponent = 0.0;
    double E1 = 0.0, E2 = 0.0;
    double maxRatioA = 0.0, maxRatioB = 0.0;
    int kMin = 0, kMax = 0;
};

struct TraceBounds {
    double maxRatioA = 0.0; // max R|a_k| / lambda_k^{1/2}
    double maxRatioB = 0.0; // max R|b_k| / lambda_k
};

// Over the first `count` modes (all when count <= 0).
inline TraceBounds trace_bound_check(const SpectralDataset& ds, int count = 0)
{
    require(ds.size() > 0, "trace_bound_check: empty dataset");
    int K = count > 0 ? std::min(count, ds.size()) : ds.size();
    TraceBounds tb;
    double R = ds.grid.R;
    for (int k = 1; k <= K; ++k) {
        const auto& md = ds.mode(k);
        tb.maxRatioA = std::max(tb.maxRatioA, R * std::abs(md.aTrace) / std::sqrt(md.lambda));
        tb.maxRatioB = std::max(tb.maxRatioB, R * std::abs(md.bTrace) / md.lambda);
    }
    return tb;
}

inline WeylReport weyl_fit(const SpectralDataset& ds, int kMin = 20, int kMax = 200)
{
    require(kMin >= 10, "weyl_fit: kMin must be >= 10");
    require(kMax > kMin, "weyl_fit: need kMax > kMin");
    require(kMax <= ds.size(), "weyl_fit: kMax exceeds the complete part of the dataset");
    WeylReport w;
    w.kMin = kMin;
    w.kMax = kMax;
    std::vector<double> k, lam;
    w.E1 = INFINITY;
    w.E2 = 0.0;
    for (int i = kMin; i <= kMax; ++i) {
        double l = ds.mode(i).lambda;
        k.push_back(i);
        lam.push_back(l);
        double ratio = l / std::pow(double(i), 4.0 / 3.0);
        w.E1 = std::min(w.E1, ratio);
        w.E2 = std::max(w.E2, ratio);
    }
    w.fittedExponent = loglog_slope(k, lam);
    TraceBounds tb = trace_bound_check(ds);
    w.maxRatioA = tb.maxRatioA;
    w.maxRatioB = tb.maxRatioB;
    return w;
}

struct SeriesPartialSums {
    std::vector<int> K;
    std::vector<double> sumA, sumB;
};

// Partial sums of sum_k k^{-4m/3} R|a_k| and the b analogue at K = 50..400.
inline SeriesPartialSums series_convergence_check(const SpectralDataset& ds, int m)
{
    require(m >= 2, "series_convergence_check: need m > n/4 + 1, i.e. m >= 2");
    require(ds.size() >= 400, "series_convergence_check: dataset has fewer than 400 complete modes");
    SeriesPartialSums s;
    s.K = {50, 100, 200, 400};
    double a = 0.0, b = 0.0, R = ds.grid.R;
    std::size_t next = 0;
    for (int k = 1; k <= 400; ++k) {
        double w = std::pow(double(k), -4.0 * m / 3.0);
        a += w * R * std::abs(ds.mode(k).aTrace);
        b += w * R * std::abs(ds.mode(k).bTrace);
        if (k == s.K[next]) {
            s.sumA.push_back(a);
            s.sumB.push_back(b);
            ++next;
        }
    }
    return s;
}

// k, lambda_k, lambda_k/k^{4/3}, ratioA, ratioB
inline void write_weyl_csv(std::ostream& os, const SpectralDataset& ds)
{
    os << "k,lambda,lambda_over_k43,ratioA,ratioB\n";
    os.precision(12);
    double R = ds.grid.R;
    for (int k = 1; k <= ds.size(); ++k) {
        const auto& md = ds.mode(k);
        os << k << ',' << md.lambda << ',' << md.lambda / std::pow(double(k), 4.0 / 3.0) << ','
           << R * std::abs(md.aTrace) / std::sqrt(md.lambda) << ',' << R * std::abs(md.bTrace) / md.lambda << '\n';
    }
}

} // namespace bispec

#endif // BISPEC_WEYL_HPP
