#ifndef BISPEC_IO_HPP
#define BISPEC_IO_HPP

// Dataset export (schema "bispec-dataset-1") and stability-report tables.

#include <cstdio>
#include <ostream>
#include <string>

#include "eig.hpp"
#include "inversion.hpp"
#include "json.hpp"

namespace bispec {

inline constexpr const char* kDatasetSchema = "bispec-dataset-1";
inline constexpr const char* kReportSchema = "report-1";

// k, l, m, q, lambda, aNorm = ||d_nu phi||, bNorm = ||d_nu Delta phi|| on the sphere of radius R.
inline void write_dataset_csv(std::ostream& os, const SpectralDataset& ds)
{
    os << "# schema=" << kDatasetSchema << " R=" << ds.grid.R << " N=" << ds.grid.N << " lmax=" << ds.lmax
       << " kPerChannel=" << ds.kPerChannel << " V=" << ds.potential.descriptor() << "\n";
    os << "k,l,m,q,lambda,aNorm,bNorm\n";
    char buf[160];
    double R = ds.grid.R;
    for (int k = 1; k <= ds.size(); ++k) {
        const auto& md = ds.mode(k);
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.15e,%.15e,%.15e\n", k, md.ell, md.m, md.q, md.lambda,
                      R * std::abs(md.aTrace), R * std::abs(md.bTrace));
        os << buf;
    }
}

// JSON variant; radial profiles u = r f on the interior nodes, one per (l, q).
inline nlohmann::ordered_json dataset_json(const SpectralDataset& ds)
{
    nlohmann::ordered_json j;
    j["schema"] = kDatasetSchema;
    j["R"] = ds.grid.R;
    j["N"] = ds.grid.N;
    j["lmax"] = ds.lmax;
    j["kPerChannel"] = ds.kPerChannel;
    j["potential"] = ds.potential.descriptor();
    j["lambdaComplete"] = ds.lambdaComplete;
    j["signConvention"] = "aTrace >= 0";
    auto& modes = j["modes"] = nlohmann::ordered_json::array();
    for (int k = 1; k <= ds.size(); ++k) {
        const auto& md = ds.mode(k);
        modes.push_back({{"k", k}, {"l", md.ell}, {"m", md.m}, {"q", md.q}, {"lambda", md.lambda},
                         {"aTrace", md.aTrace}, {"bTrace", md.bTrace}});
    }
    auto& prof = j["profiles"] = nlohmann::ordered_json::array();
    bool have = !ds.channels.empty() && ds.channels.front().profiles.has_value();
    if (have) {
        j["nodes"] = ds.grid.nodes;
        for (int l = 0; l <= ds.lmax; ++l) {
            const auto& cs = ds.channels[std::size_t(l)];
            for (int q = 1; q <= ds.kPerChannel; ++q) {
                if (cs.lambda[std::size_t(q - 1)] >= ds.lambdaComplete) break;
                std::vector<double> u(static_cast<std::size_t>(ds.grid.N));
                for (int i = 0; i < ds.grid.N; ++i) u[std::size_t(i)] = (*cs.profiles)(i, q - 1);
                prof.push_back({{"l", l}, {"q", q}, {"u", u}});
            }
        }
    }
    return j;
}

inline void write_stability_csv(std::ostream& os, const std::vector<StabilityReport>& reports)
{
    os << "amplitude,E,m,Kmax,eps0,eps1,eps2,eps,l2Diff,reconError,deltaEmp\n";
    char buf[320];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%.6g,%d,%d,%d,%.12e,%.12e,%.12e,%.12e,%.12e,%.12e,%.6f\n", r.amplitude, r.E,
                      r.m, r.Kmax, r.eps0, r.eps1, r.eps2, r.eps, r.l2Diff, r.reconError, r.deltaEmp);
        os << buf;
    }
}

inline nlohmann::ordered_json stability_json(const StabilityReport& r)
{
    return {{"amplitude", r.amplitude}, {"E", r.E},       {"m", r.m},
            {"Kmax", r.Kmax},           {"eps0", r.eps0}, {"eps1", r.eps1},
            {"eps2", r.eps2},           {"eps", r.eps},   {"l2Diff", r.l2Diff},
            {"reconError", r.reconError}, {"deltaEmp", r.deltaEmp}};
}

} // namespace bispec

#endif // BISPEC_IO_HPP
