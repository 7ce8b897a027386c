#ifndef BISPEC_RADIAL_OP_HPP
#define BISPEC_RADIAL_OP_HPP

// Radial reduction of Delta^2 + V on the ball B_R in R^3 with Navier
// conditions u = Delta u = 0. Per degree l the unknown is u = r f on the
// interior nodes r_i = i h, h = R/(N+1).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "specfun.hpp"

namespace bispec {

struct RadialGrid {
    double R = 1.0;
    int N = 0;
    double h = 0.0;
    std::vector<double> nodes;

    bool operator==(const RadialGrid& o) const { return R == o.R && N == o.N; }
};

inline RadialGrid build_grid(double R, int N)
{
    require(R > 0.0, "build_grid: R must be positive");
    require(N >= 50, "build_grid: N must be at least 50");
    RadialGrid g;
    g.R = R;
    g.N = N;
    g.h = R / (N + 1);
    g.nodes.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) g.nodes[std::size_t(i)] = (i + 1) * g.h;
    return g;
}

// One analytic piece of a radial potential.
struct PotentialTerm {
    enum class Kind { Constant, Gaussian };
    Kind kind = Kind::Constant;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0; // standard deviation of the Gaussian

    double operator()(double r) const
    {
        if (kind == Kind::Constant) return amplitude;
        double x = (r - center) / width;
        return amplitude * std::exp(-0.5 * x * x);
    }
};

// Real radial potential: a sum of analytic terms, optionally plus a
// piecewise-linear sampled table.
class RadialPotential {
public:
    RadialPotential() = default;

    static RadialPotential zero() { return {}; }

    static RadialPotential constant(double c)
    {
        RadialPotential v;
        v.terms_.push_back({PotentialTerm::Kind::Constant, c, 0.0, 1.0});
        return v;
    }

    // a exp(-(r - center)^2 / (2 width^2))
    static RadialPotential gaussian(double amplitude, double center, double width)
    {
        require(width > 0.0, "gaussian-bump: width must be positive");
        RadialPotential v;
        v.terms_.push_back({PotentialTerm::Kind::Gaussian, amplitude, center, width});
        return v;
    }

    static RadialPotential sampled(std::vector<double> r, std::vector<double> values)
    {
        require(r.size() == values.size() && r.size() >= 2, "sampled potential: need matching tables of length >= 2");
        require(std::is_sorted(r.begin(), r.end()), "sampled potential: radii must ascend");
        RadialPotential v;
        v.tableR_ = std::move(r);
        v.tableV_ = std::move(values);
        return v;
    }

    double operator()(double r) const
    {
        double s = 0.0;
        for (const auto& t : terms_) s += t(r);
        if (!tableR_.empty()) s += tableScale_ * interpolate(r);
        return s;
    }

    bool is_zero() const
    {
        for (const auto& t : terms_)
            if (t.amplitude != 0.0) return false;
        return tableR_.empty() || tableScale_ == 0.0;
    }

    RadialPotential scaled(double c) const
    {
        RadialPotential v = *this;
        for (auto& t : v.terms_) t.amplitude *= c;
        v.tableScale_ *= c;
        return v;
    }

    friend RadialPotential operator+(const RadialPotential& a, const RadialPotential& b)
    {
        require(a.tableR_.empty() || b.tableR_.empty(), "cannot add two sampled potentials");
        RadialPotential v = a;
        v.terms_.insert(v.terms_.end(), b.terms_.begin(), b.terms_.end());
        if (!b.tableR_.empty()) {
            v.tableR_ = b.tableR_;
            v.tableV_ = b.tableV_;
            v.tableScale_ = b.tableScale_;
        }
        return v;
    }

    friend RadialPotential operator-(const RadialPotential& a, const RadialPotential& b) { return a + b.scaled(-1.0); }

    const std::vector<PotentialTerm>& terms() const { return terms_; }

    // Config-file form, e.g. "zero", "const(0.5)", "gaussian(1, 0, 0.2) + const(1)".
    std::string descriptor() const
    {
        std::ostringstream os;
        os.precision(17);
        bool first = true;
        for (const auto& t : terms_) {
            if (!first) os << " + ";
            first = false;
            if (t.kind == PotentialTerm::Kind::Constant)
                os << "const(" << t.amplitude << ")";
            else
                os << "gaussian(" << t.amplitude << ", " << t.center << ", " << t.width << ")";
        }
        if (!tableR_.empty()) {
            if (!first) os << " + ";
            first = false;
            os << "sampled(" << tableR_.size() << " points)";
        }
        return first ? "zero" : os.str();
    }

private:
    double interpolate(double r) const
    {
        if (r <= tableR_.front()) return tableV_.front();
        if (r >= tableR_.back()) return tableV_.back();
        auto it = std::upper_bound(tableR_.begin(), tableR_.end(), r);
        std::size_t j = std::size_t(it - tableR_.begin());
        double t = (r - tableR_[j - 1]) / (tableR_[j] - tableR_[j - 1]);
        return (1 - t) * tableV_[j - 1] + t * tableV_[j];
    }

    std::vector<PotentialTerm> terms_;
    std::vector<double> tableR_, tableV_;
    double tableScale_ = 1.0;
};

inline RadialPotential parse_potential(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    require(!s.empty(), "potential descriptor is empty");
    RadialPotential v;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t end = s.find(')', pos);
        std::string item = end == std::string::npos ? s.substr(pos) : s.substr(pos, end + 1 - pos);
        pos = end == std::string::npos ? s.size() : end + 1;
        if (pos < s.size()) {
            require(s[pos] == '+', "potential descriptor: expected '+' between terms in '" + text + "'");
            ++pos;
        }
        if (item == "zero" || item == "0") continue;
        std::size_t open = item.find('(');
        require(open != std::string::npos && item.back() == ')', "potential descriptor: bad term '" + item + "'");
        std::string name = item.substr(0, open);
        std::vector<double> args;
        std::stringstream ss(item.substr(open + 1, item.size() - open - 2));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t used = 0;
                args.push_back(std::stod(tok, &used));
                require(used == tok.size(), "");
            } catch (const std::exception&) {
                throw PreconditionError("potential descriptor: bad number '" + tok + "'");
            }
        }
        if (name == "const") {
            require(args.size() == 1, "const(c) takes one argument");
            v = v + RadialPotential::constant(args[0]);
        } else if (name == "gaussian") {
            require(args.size() == 3, "gaussian(amplitude, center, width) takes three arguments");
            v = v + RadialPotential::gaussian(args[0], args[1], args[2]);
        } else {
            throw PreconditionError("potential descriptor: unknown family '" + name + "'");
        }
    }
    return v;
}

inline std::vector<double> sample_potential(const RadialPotential& V, const RadialGrid& g)
{
    std::vector<double> s(static_cast<std::size_t>(g.N));
    for (int i = 0; i < g.N; ++i) s[std::size_t(i)] = V(g.nodes[std::size_t(i)]);
    return s;
}

inline double sup_bound(const std::vector<double>& samples)
{
    double q = 0.0;
    for (double v : samples) q = std::max(q, std::abs(v));
    return q;
}

// T_l u = (-u_{i-1} + 2u_i - u_{i+1})/h^2 + l(l+1)/r_i^2 u_i, u_0 = u_{N+1} = 0.
template <class Real = double>
Tridiagonal<Real> assemble_dirichlet_laplacian(const RadialGrid& g, int l)
{
    require(l >= 0, "assemble_dirichlet_laplacian: l must be >= 0");
    Tridiagonal<Real> t;
    Real h = Real(g.R) / Real(g.N + 1);
    Real ih2 = Real(1) / (h * h);
    t.diag.resize(static_cast<std::size_t>(g.N));
    t.off.assign(std::size_t(g.N - 1), -ih2);
    for (int i = 0; i < g.N; ++i) {
        Real r = Real(i + 1) * h;
        t.diag[std::size_t(i)] = 2 * ih2 + Real(l) * Real(l + 1) / (r * r);
    }
    return t;
}

struct ChannelOperator {
    int ell = 0;
    Tridiagonal<double> T;
    Matrix<double> H;
    std::vector<double> V;
};

// H = T_l^2 + diag(V).
inline ChannelOperator assemble_navier_biharmonic(const RadialGrid& g, int l, const std::vector<double>& V)
{
    require(int(V.size()) == g.N, "assemble_navier_biharmonic: potential not sampled on this grid");
    ChannelOperator op;
    op.ell = l;
    op.T = assemble_dirichlet_laplacian<double>(g, l);
    op.V = V;
    Matrix<double> t = op.T.dense();
    op.H = t * t;
    for (int i = 0; i < g.N; ++i) op.H(i, i) += V[std::size_t(i)];
    return op;
}

// Pentadiagonal bands of T_l^2 + diag(V): b0 diagonal, b1 first and b2 second
// superdiagonal.
template <class Real>
void navier_bands(const RadialGrid& g, int l, const std::vector<double>& V,
                  std::vector<Real>& b0, std::vector<Real>& b1, std::vector<Real>& b2)
{
    auto t = assemble_dirichlet_laplacian<Real>(g, l);
    int n = g.N;
    Real o = t.off.empty() ? Real(0) : t.off[0];
    b0.assign(std::size_t(n), Real(0));
    b1.assign(std::size_t(std::max(n - 1, 0)), Real(0));
    b2.assign(std::size_t(std::max(n - 2, 0)), Real(0));
    for (int i = 0; i < n; ++i) {
        Real d = t.diag[std::size_t(i)];
        int nb = (i > 0) + (i + 1 < n);
        b0[std::size_t(i)] = d * d + Real(nb) * o * o + Real(V[std::size_t(i)]);
        if (i + 1 < n) b1[std::size_t(i)] = o * (d + t.diag[std::size_t(i + 1)]);
        if (i + 2 < n) b2[std::size_t(i)] = o * o;
    }
}

} // namespace bispec

#endif // BISPEC_RADIAL_OP_HPP
