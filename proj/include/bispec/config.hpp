#ifndef BISPEC_CONFIG_HPP
#define BISPEC_CONFIG_HPP

// Plain key = value experiment configuration. '#' starts a comment; lists are
// comma separated; vector lists separate vectors with ';'.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "inversion.hpp"
#include "radial_op.hpp"

namespace bispec {

struct ExperimentConfig {
    double R = 1.0;
    int N = 400;
    int lmax = 20;
    int kPerChannel = 20;
    std::string V1 = "zero";
    std::string bump = "gaussian(1,0,0.2)"; // V2 = V1 + amplitude * bump
    std::vector<int> E{0, 5};
    int m = 2;
    double sigma = 0.25;
    double cGap = 0.5;
    std::vector<double> zeta{10.0, 20.0, 40.0};
    double reconZeta = 30.0;
    std::vector<Vec3> xi{{2.0, 0.0, 0.0}};
    std::vector<double> amplitudes{0.02, 0.05, 0.1};
    std::vector<double> bornAmplitudes{0.05, 0.1, 0.2};
    std::vector<double> dtnTargets{1e2, 1e3, 1e4, 1e5};
    double reconAmplitude = 0.1;
    int Kmax = 200;
    int nXi = 32;
    std::string output = "out";
    Pairing pairing = Pairing::Channel;
    CutoffMode cutoffMode = CutoffMode::Diagnostic;
    std::string grouping = "auto";
    std::uint64_t seed = 20240611;
    int threads = 1;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

inline double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw PreconditionError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

inline long long to_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw PreconditionError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    if (trim(v).empty()) return out;
    for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
    return out;
}

} // namespace detail

inline ExperimentConfig parse_config(std::istream& in)
{
    ExperimentConfig c;
    std::map<std::string, std::string> kv;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("config line " + std::to_string(lineNo) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq)), val = detail::trim(line.substr(eq + 1));
        if (!kv.emplace(key, val).second)
            throw PreconditionError("config line " + std::to_string(lineNo) + ": duplicate key '" + key + "'");
    }
    for (const auto& [k, v] : kv) {
        if (k == "R") c.R = detail::to_double(k, v);
        else if (k == "N") c.N = int(detail::to_int(k, v));
        else if (k == "lmax") c.lmax = int(detail::to_int(k, v));
        else if (k == "kPerChannel") c.kPerChannel = int(detail::to_int(k, v));
        else if (k == "V1") c.V1 = v;
        else if (k == "bump") c.bump = v;
        else if (k == "E") {
            c.E.clear();
            for (const auto& s : detail::split(v, ',')) c.E.push_back(int(detail::to_int(k, s)));
        }
        else if (k == "m") c.m = int(detail::to_int(k, v));
        else if (k == "sigma") c.sigma = detail::to_double(k, v);
        else if (k == "cGap") c.cGap = detail::to_double(k, v);
        else if (k == "zeta") c.zeta = detail::to_doubles(k, v);
        else if (k == "reconZeta") c.reconZeta = detail::to_double(k, v);
        else if (k == "xi") {
            c.xi.clear();
            for (const auto& s : detail::split(v, ';')) {
                auto comp = detail::to_doubles(k, s);
                if (comp.size() != 3) throw PreconditionError("config: 'xi' entries need three components");
                c.xi.push_back({comp[0], comp[1], comp[2]});
            }
        }
        else if (k == "amplitudes") c.amplitudes = detail::to_doubles(k, v);
        else if (k == "bornAmplitudes") c.bornAmplitudes = detail::to_doubles(k, v);
        else if (k == "dtnTargets") c.dtnTargets = detail::to_doubles(k, v);
        else if (k == "reconAmplitude") c.reconAmplitude = detail::to_double(k, v);
        else if (k == "Kmax") c.Kmax = int(detail::to_int(k, v));
        else if (k == "nXi") c.nXi = int(detail::to_int(k, v));
        else if (k == "output") c.output = v;
        else if (k == "pairing") {
            if (v == "channel") c.pairing = Pairing::Channel;
            else if (v == "globalIndex") c.pairing = Pairing::GlobalIndex;
            else throw PreconditionError("config: pairing must be 'channel' or 'globalIndex'");
        }
        else if (k == "cutoffMode") {
            if (v == "compliant") c.cutoffMode = CutoffMode::Compliant;
            else if (v == "diagnostic") c.cutoffMode = CutoffMode::Diagnostic;
            else throw PreconditionError("config: cutoffMode must be 'compliant' or 'diagnostic'");
        }
        else if (k == "grouping") c.grouping = v;
        else if (k == "seed") {
            long long s = detail::to_int(k, v);
            if (s < 0) throw PreconditionError("config: seed must be non-negative");
            c.seed = std::uint64_t(s);
        }
        else if (k == "threads") c.threads = int(detail::to_int(k, v));
        else throw PreconditionError("config: unknown key '" + k + "'");
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw PreconditionError("config: cannot open '" + path + "'");
    return parse_config(in);
}

// Every precondition of the pipeline, checked before any computation.
// lmax below the dataset minimum is left to the completeness check so that
// verify can report it; commands that build datasets directly pass
// requireDatasetLmax.
inline void validate_config(const ExperimentConfig& c, bool requireDatasetLmax = true)
{
    require(c.R > 0.0 && c.R <= 100.0, "config: R must be in (0, 100]");
    require(c.N >= 50 && c.N <= 20000, "config: N must be in [50, 20000]");
    require(c.N % 2 == 0, "config: N must be even (the convergence check halves it)");
    require(c.lmax >= 0 && c.lmax <= kMaxDegree, "config: lmax must be in [0, " + std::to_string(kMaxDegree) + "]");
    if (requireDatasetLmax) require(c.lmax >= 10, "config: lmax must be >= 10");
    require(c.kPerChannel >= 10 && c.kPerChannel <= c.N / 2, "config: kPerChannel must be in [10, N/2]");
    parse_potential(c.V1);
    RadialPotential bump = parse_potential(c.bump);
    require(!bump.is_zero(), "config: bump must be nonzero");
    require(!c.E.empty(), "config: E needs at least one offset");
    for (int e : c.E) require(e >= 0 && e <= 1000, "config: E offsets must be in [0, 1000]");
    require(c.m >= 2 && c.m <= 10, "config: m must be in [2, 10] (series convergence needs m > n/4 + 1)");
    require(c.sigma > 0.0 && c.sigma <= 0.25, "config: sigma must be in (0, 1/4]");
    require(c.cGap > 0.0 && c.cGap < 1.0, "config: cGap must be in (0, 1)");
    require(!c.zeta.empty(), "config: zeta list is empty");
    for (double z : c.zeta) require(z >= 10.0 && z <= 200.0, "config: zeta values must be in [10, 200]");
    require(c.reconZeta >= 10.0 && c.reconZeta <= 200.0, "config: reconZeta must be in [10, 200]");
    require(!c.xi.empty(), "config: xi list is empty");
    for (const auto& x : c.xi)
        for (double z : c.zeta)
            require(norm(x) < 2.0 * z, "config: every |xi| must be below 2 zeta");
    validate_amplitudes(c.amplitudes);
    require(c.bornAmplitudes.size() >= 2, "config: bornAmplitudes needs at least two values");
    for (double a : c.bornAmplitudes) require(a > 0.0 && a <= 0.2, "config: bornAmplitudes must lie in (0, 0.2]");
    require(c.dtnTargets.size() >= 2, "config: dtnTargets needs at least two values");
    for (double t : c.dtnTargets) require(t >= 10.0 && t <= 1e7, "config: dtnTargets must lie in [10, 1e7]");
    require(c.reconAmplitude > 0.0 && c.reconAmplitude <= 0.2, "config: reconAmplitude must be in (0, 0.2]");
    require(c.Kmax >= 10, "config: Kmax must be >= 10");
    require(c.nXi >= 16 && c.nXi <= 512, "config: nXi must be in [16, 512]");
    require(!c.output.empty(), "config: output directory is empty");
    require(c.grouping == "auto" || c.grouping == "firstOnly" || c.grouping == "both",
            "config: grouping must be 'auto', 'firstOnly' or 'both'");
    require(c.threads >= 1 && c.threads <= 256, "config: threads must be in [1, 256]");
}

namespace detail {

// Shortest text that reads back to the same double.
inline std::string fmt(double x)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline std::string fmt(int x) { return std::to_string(x); }

template <class T>
std::string fmt_list(const std::vector<T>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

} // namespace detail

// Canonical key = value text. Invocation settings (output directory, thread
// count) do not affect results and are omitted when withInvocation is false.
inline std::string config_text(const ExperimentConfig& c, bool withInvocation = true)
{
    using detail::fmt;
    using detail::fmt_list;
    std::string s;
    auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    kv("R", fmt(c.R));
    kv("N", fmt(c.N));
    kv("lmax", fmt(c.lmax));
    kv("kPerChannel", fmt(c.kPerChannel));
    kv("V1", c.V1);
    kv("bump", c.bump);
    kv("E", fmt_list(c.E));
    kv("m", fmt(c.m));
    kv("sigma", fmt(c.sigma));
    kv("cGap", fmt(c.cGap));
    kv("zeta", fmt_list(c.zeta));
    kv("reconZeta", fmt(c.reconZeta));
    std::string xi;
    for (std::size_t i = 0; i < c.xi.size(); ++i)
        xi += (i ? "; " : "") + fmt(c.xi[i][0]) + "," + fmt(c.xi[i][1]) + "," + fmt(c.xi[i][2]);
    kv("xi", xi);
    kv("amplitudes", fmt_list(c.amplitudes));
    kv("bornAmplitudes", fmt_list(c.bornAmplitudes));
    kv("dtnTargets", fmt_list(c.dtnTargets));
    kv("reconAmplitude", fmt(c.reconAmplitude));
    kv("Kmax", fmt(c.Kmax));
    kv("nXi", fmt(c.nXi));
    if (withInvocation) kv("output", c.output);
    kv("pairing", pairing_name(c.pairing));
    kv("cutoffMode", cutoff_name(c.cutoffMode));
    kv("grouping", c.grouping);
    kv("seed", std::to_string(c.seed));
    if (withInvocation) kv("threads", fmt(c.threads));
    return s;
}

} // namespace bispec

#endif // BISPEC_CONFIG_HPP
