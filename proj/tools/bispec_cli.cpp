// bispec: forward solves, verification, reconstruction and stability sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "bispec/config.hpp"
#include "bispec/io.hpp"
#include "bispec/verify.hpp"

namespace fs = std::filesystem;
using namespace bispec;

namespace {

struct Options {
    std::string config;
    std::string out;
    int threads = 0;
    long long seed = -1;
};

ExperimentConfig load(const Options& o, bool requireDatasetLmax)
{
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (!o.out.empty()) c.output = o.out;
    if (o.threads > 0) c.threads = o.threads;
    if (o.seed >= 0) c.seed = std::uint64_t(o.seed);
    validate_config(c, requireDatasetLmax);
    return c;
}

fs::path out_dir(const ExperimentConfig& c)
{
    fs::path p(c.output);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
}

void write_json(const fs::path& p, const ojson& j) { write_text(p, j.dump(2) + "\n"); }

ojson report_header(const ExperimentConfig& c, const std::string& command)
{
    ojson j;
    j["schema"] = kReportSchema;
    j["command"] = command;
    j["seed"] = c.seed;
    j["config"] = config_text(c, false);
    return j;
}

Grouping resolve_grouping(Verifier& v) { return v.grouping(); }

int cmd_eig(const ExperimentConfig& c)
{
    fs::path dir = out_dir(c);
    RadialGrid g = build_grid(c.R, c.N);
    RadialPotential V1 = parse_potential(c.V1), bump = parse_potential(c.bump);
    std::vector<std::pair<std::string, RadialPotential>> pots{{"V1", V1}};
    for (std::size_t i = 0; i < c.amplitudes.size(); ++i)
        pots.push_back({"V2_" + std::to_string(i + 1), V1 + bump.scaled(c.amplitudes[i])});
    DatasetOptions opt;
    opt.threads = c.threads;
    opt.profiles = true;
    for (const auto& [name, V] : pots) {
        SpectralDataset ds = build_dataset(V, g, c.lmax, c.kPerChannel, opt);
        std::ostringstream csv;
        write_dataset_csv(csv, ds);
        write_text(dir / ("dataset_" + name + ".csv"), csv.str());
        write_json(dir / ("dataset_" + name + ".json"), dataset_json(ds));
        std::printf("%s: %d modes below lambdaComplete = %.6e, lambda_1 = %.10e\n", name.c_str(), ds.size(),
                    ds.lambdaComplete, ds.mode(1).lambda);
    }
    return 0;
}

int print_checks(const std::vector<CheckResult>& checks)
{
    bool all = true;
    for (const auto& c : checks) {
        std::printf("[%s] %2d %-18s %s\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), c.message.c_str());
        all = all && c.pass;
    }
    return all ? 0 : 1;
}

int cmd_verify(const ExperimentConfig& c)
{
    fs::path dir = out_dir(c);
    Verifier v(c);
    auto checks = v.run_all();
    write_json(dir / "verify.json", verify_report(c, checks));
    return print_checks(checks);
}

int cmd_single_check(const ExperimentConfig& c, int id, const std::string& command, const std::string& file)
{
    fs::path dir = out_dir(c);
    Verifier v(c);
    CheckResult r = v.run(id);
    ojson j = report_header(c, command);
    j["check"] = check_json(r);
    write_json(dir / file, j);
    return print_checks({r});
}

int cmd_reconstruct(const ExperimentConfig& c)
{
    fs::path dir = out_dir(c);
    Verifier v(c);
    RadialGrid g = build_grid(c.R, c.N);
    RadialPotential V1 = parse_potential(c.V1), V2 = V1 + parse_potential(c.bump).scaled(c.reconAmplitude);
    int L = std::max(c.lmax, plane_wave_lmax(cplx(c.reconZeta, 1.0), c.R));
    DatasetOptions opt;
    opt.threads = c.threads;
    SpectralDataset ds1 = build_dataset(V1, g, L, c.kPerChannel, opt);
    SpectralDataset ds2 = build_dataset(V2, g, L, c.kPerChannel, opt);
    ReconstructOptions ro;
    ro.nXi = c.nXi;
    ro.mode = c.cutoffMode;
    ro.grouping = resolve_grouping(v);
    Reconstruction rec = reconstruct_difference(ds1, ds2, c.reconZeta, ro);

    std::ostringstream csv;
    csv << "r,W,exact\n";
    char buf[128];
    for (std::size_t i = 0; i < rec.r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.12e,%.12e\n", rec.r[i], rec.W[i], rec.exact[i]);
        csv << buf;
    }
    write_text(dir / "reconstruction.csv", csv.str());
    ojson j = report_header(c, "reconstruct");
    ojson samples = ojson::array();
    for (std::size_t i = 0; i < rec.rho.size(); ++i)
        samples.push_back({{"rho", rec.rho[i]}, {"value", cplx_json(rec.samples[i])}});
    j["cutoffMode"] = cutoff_name(rec.mode);
    j["theoremCompliant"] = rec.mode == CutoffMode::Compliant;
    j["tailDominated"] = rec.tailDominated;
    j["cutoff"] = rec.cutoff;
    j["zeta"] = c.reconZeta;
    j["grouping"] = grouping_name(ro.grouping);
    j["reconError"] = rec.reconError;
    j["l2Diff"] = rec.l2Diff;
    j["relError"] = rec.relError;
    j["samples"] = samples;
    write_json(dir / "reconstruction.json", j);
    std::printf("%s cutoff %.4f: relative L2 error %.4f%s\n", cutoff_name(rec.mode), rec.cutoff, rec.relError,
                rec.tailDominated ? " (tail-dominated)" : " (not theorem-compliant)");
    return 0;
}

int cmd_sweep(const ExperimentConfig& c)
{
    fs::path dir = out_dir(c);
    Verifier v(c);
    SweepParams p;
    p.grid = build_grid(c.R, c.N);
    p.V1 = parse_potential(c.V1);
    p.bump = parse_potential(c.bump);
    p.amplitudes = c.amplitudes;
    p.lmax = std::max(c.lmax, plane_wave_lmax(cplx(c.reconZeta, 1.0), c.R));
    p.kPerChannel = c.kPerChannel;
    p.offsets = c.E;
    p.m = c.m;
    p.Kmax = c.Kmax;
    p.zeta = c.reconZeta;
    p.pairing = c.pairing;
    p.recon.nXi = c.nXi;
    p.recon.mode = c.cutoffMode;
    p.recon.grouping = resolve_grouping(v);
    p.sigma = c.sigma;
    p.threads = c.threads;
    auto results = stability_sweep(p);

    std::vector<StabilityReport> all;
    ojson j = report_header(c, "sweep");
    j["grouping"] = grouping_name(p.recon.grouping);
    j["pairing"] = pairing_name(p.pairing);
    j["cutoffMode"] = cutoff_name(p.recon.mode);
    j["Kmax"] = p.Kmax;
    ojson sweeps = ojson::array();
    bool ok = true;
    for (const auto& r : results) {
        ojson reps = ojson::array();
        for (const auto& s : r.reports) {
            reps.push_back(stability_json(s));
            all.push_back(s);
        }
        sweeps.push_back({{"E", r.E},
                          {"offsetApplied", r.E > 0},
                          {"deltaEmp", r.deltaEmp},
                          {"deltaTheory", r.deltaTheory},
                          {"envelopeC", r.envelopeC},
                          {"monotone", r.monotone},
                          {"envelopeHolds", r.envelopeHolds},
                          {"eps0TailBound", r.eps0TailBound},
                          {"eps1TailBound", r.eps1TailBound},
                          {"eps2TailBound", r.eps2TailBound},
                          {"reports", reps}});
        std::printf("E = %d: deltaEmp = %.4f (theory %.6f), monotone %s, envelope %s\n", r.E, r.deltaEmp,
                    r.deltaTheory, r.monotone ? "yes" : "no", r.envelopeHolds ? "yes" : "no");
        ok = ok && r.deltaEmp > 0.0 && r.monotone && r.envelopeHolds;
    }
    j["sweeps"] = sweeps;
    std::ostringstream csv;
    write_stability_csv(csv, all);
    write_text(dir / "stability.csv", csv.str());
    write_json(dir / "stability.json", j);
    return ok ? 0 : 1;
}

// Kernel magnitude along real lambda at s = 1 plus a seeded Monte-Carlo check
// that first-quadrant fourth roots lie in the resonance-free region.
int cmd_resolvent_scan(const ExperimentConfig& c)
{
    fs::path dir = out_dir(c);
    std::ostringstream csv;
    csv << "lambda,absKernel\n";
    std::vector<double> lam, mag;
    char buf[96];
    for (int i = 0; i <= 30; ++i) {
        double l = std::pow(10.0, 2.0 + 3.0 * i / 30.0);
        double a = std::abs(free_resolvent_kernel(l, 1.0, c.R));
        lam.push_back(l);
        mag.push_back(a);
        std::snprintf(buf, sizeof buf, "%.10e,%.10e\n", l, a);
        csv << buf;
    }
    write_text(dir / "resolvent_scan.csv", csv.str());
    double slope = loglog_slope(lam, mag);

    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> radius(2.0, 50.0), angle(0.0, std::numbers::pi / 2);
    ResonanceRegionParams rp = default_region(c.R);
    int inside = 0, samples = 2000;
    for (int i = 0; i < samples; ++i) {
        cplx k = std::polar(radius(rng), angle(rng) * 0.999 + 1e-4);
        if (in_region(std::pow(k, 4), rp)) ++inside;
    }
    ojson j = report_header(c, "resolvent-scan");
    j["slope"] = slope;
    j["slopeTarget"] = {-0.55, -0.45};
    j["regionSamples"] = samples;
    j["regionInside"] = inside;
    write_json(dir / "resolvent_scan.json", j);
    bool ok = std::abs(slope + 0.5) <= 0.05 && inside == samples;
    std::printf("kernel slope %.4f, first-quadrant samples in region %d/%d\n", slope, inside, samples);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"bispec: biharmonic inverse spectral toolkit"};
    app.require_subcommand(1);
    Options o;
    auto add = [&](const std::string& name, const std::string& desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->add_option("--config", o.config, "experiment config file (key = value)");
        s->add_option("--out", o.out, "output directory");
        s->add_option("--threads", o.threads, "worker threads for channel solves")->check(CLI::Range(1, 256));
        s->add_option("--seed", o.seed, "seed for Monte-Carlo checks")->check(CLI::NonNegativeNumber);
        return s;
    };
    CLI::App* eig = add("eig", "build spectral datasets and export them");
    CLI::App* verify = add("verify", "run the acceptance checks");
    CLI::App* decay = add("dtn-decay", "DtN difference decay along real lambda");
    CLI::App* iso = add("isozaki-check", "Isozaki identity in the Born regime");
    CLI::App* recon = add("reconstruct", "low-pass reconstruction of V1 - V2");
    CLI::App* sweep = add("sweep", "Hoelder stability sweep");
    CLI::App* scan = add("resolvent-scan", "free resolvent kernel scaling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*eig) return cmd_eig(load(o, true));
        if (*verify) return cmd_verify(load(o, false));
        if (*decay) return cmd_single_check(load(o, true), 5, "dtn-decay", "dtn_decay.json");
        if (*iso) return cmd_single_check(load(o, true), 6, "isozaki-check", "isozaki.json");
        if (*recon) return cmd_reconstruct(load(o, true));
        if (*sweep) return cmd_sweep(load(o, true));
        if (*scan) return cmd_resolvent_scan(load(o, true));
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
