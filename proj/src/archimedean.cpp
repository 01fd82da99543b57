#include "cm/archimedean.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/sobol.hpp>

#include "cm/error.hpp"

namespace cm {

namespace {

const double kTwoPi = 6.283185307179586476925286766559;

// Half-cycle panels: a GL rule with m nodes then sees at most a phase change of pi per panel.
constexpr int kFineNodes = 10, kCoarseNodes = 8;

int nodes_for(bool fine) { return fine ? kFineNodes : kCoarseNodes; }

long panels_for(double cycles) { return (long)std::ceil(2.0 * cycles) + 1; }

// int_0^1 e(a x) dx
cplx linear_phase_integral(double a) {
    if (std::abs(a) < 1e-8) return {1.0 - (kTwoPi * a) * (kTwoPi * a) / 6.0, kTwoPi * a / 2.0};
    return (unit_phase(a) - 1.0) / cplx(0.0, kTwoPi * a);
}

// Composite GL of fn over [a, b] split into `panels` equal pieces.
template <class Fn>
cplx composite(double a, double b, long panels, int m, Fn&& fn) {
    const GaussRule& g = gauss_legendre(m);
    double h = (b - a) / (double)panels;
    CompensatedComplexSum acc;
    for (long p = 0; p < panels; ++p) {
        double mid = a + (p + 0.5) * h;
        for (int i = 0; i < m; ++i) acc.add(fn(mid + 0.5 * h * g.nodes[i]) * (0.5 * h * g.weights[i]));
    }
    return acc.value();
}

}  // namespace

CubeIntegrator::CubeIntegrator(const PolynomialSystem& sys, double budget)
    : n_(sys.nvars()), r_(sys.size()), budget_(budget) {
    if (r_ == 0) throw InvalidInput("cube integral: empty system");
    for (const auto& p : sys.polys()) {
        if (p.is_zero()) throw InvalidInput("cube integral: zero form");
        if (!p.is_homogeneous()) throw InvalidInput("cube integral needs homogeneous forms; got " + format_polynomial(p));
        if (d_ == 0) d_ = p.degree();
        if (p.degree() != d_) throw InvalidInput("cube integral needs forms of one common degree");
    }
    if (d_ < 1) throw InvalidInput("cube integral needs forms of positive degree");
    for (const auto& p : sys.polys()) {
        std::vector<Term> ts;
        double sum = 0, grad = 0;
        for (const auto& [m, c] : p.terms()) {
            double cd = c.get_d();
            ts.push_back({cd, m.exps});
            sum += std::abs(cd);
            grad += std::abs(cd) * m.degree();
        }
        terms_.push_back(std::move(ts));
        bound_.push_back(sum);
        grad_bound_.push_back(grad);
    }
    auto sep = separable_parts(sys);
    if (!sep) return;
    std::vector<std::vector<std::vector<mpz_class>>> seen;
    for (std::size_t i = 0; i < n_; ++i) {
        const auto& u = sep->univariate[i];
        auto it = std::find(seen.begin(), seen.end(), u);
        if (it != seen.end()) {
            blocks_[(std::size_t)(it - seen.begin())].power += 1;
            continue;
        }
        seen.push_back(u);
        Block b;
        for (const auto& row : u) {
            std::vector<double> cr;
            for (const auto& c : row) cr.push_back(c.get_d());
            b.coef.push_back(cr);
        }
        blocks_.push_back(std::move(b));
    }
}

cplx CubeIntegrator::block_integral(const Block& b, const std::vector<double>& tau, bool fine) const {
    std::vector<double> a;
    for (std::size_t k = 0; k < r_; ++k)
        for (std::size_t e = 0; e < b.coef[k].size(); ++e) {
            if (a.size() <= e) a.resize(e + 1, 0.0);
            a[e] += tau[k] * b.coef[k][e];
        }
    while (!a.empty() && a.back() == 0.0) a.pop_back();
    if (a.size() <= 1) return 1.0;  // variable absent from every form
    if (a.size() == 2) return linear_phase_integral(a[1]);
    double cycles = 0;
    for (std::size_t e = 1; e < a.size(); ++e) cycles += std::abs(a[e]) * (double)e;
    return composite(0.0, 1.0, panels_for(cycles), nodes_for(fine), [&](double x) {
        double v = 0;
        for (std::size_t e = a.size(); e-- > 1;) v = (v + a[e]) * x;
        return unit_phase(v);
    });
}

double CubeIntegrator::phase(const std::vector<double>& x, const std::vector<double>& tau) const {
    double v = 0;
    for (std::size_t k = 0; k < r_; ++k) {
        if (tau[k] == 0.0) continue;
        double fk = 0;
        for (const auto& t : terms_[k]) {
            double m = t.coef;
            for (std::size_t j = 0; j < n_; ++j)
                for (unsigned e = 0; e < t.exps[j]; ++e) m *= x[j];
            fk += m;
        }
        v += tau[k] * fk;
    }
    return v;
}

cplx CubeIntegrator::tensor_integral(const std::vector<double>& tau, bool fine) const {
    double cycles = 0;
    for (std::size_t k = 0; k < r_; ++k) cycles += std::abs(tau[k]) * grad_bound_[k];
    long panels = panels_for(cycles);
    int m = nodes_for(fine);
    const GaussRule& g = gauss_legendre(m);
    std::size_t per_dim = (std::size_t)panels * (std::size_t)m;
    if (std::pow((double)per_dim, (double)n_) > budget_)
        throw BudgetExceeded("tensor quadrature needs " + std::to_string(per_dim) + "^" + std::to_string(n_) +
                             " nodes, budget " + std::to_string((long long)budget_));
    std::vector<double> xs(per_dim), ws(per_dim);
    double h = 1.0 / (double)panels;
    for (long p = 0; p < panels; ++p)
        for (int i = 0; i < m; ++i) {
            xs[(std::size_t)p * m + i] = (p + 0.5) * h + 0.5 * h * g.nodes[i];
            ws[(std::size_t)p * m + i] = 0.5 * h * g.weights[i];
        }
    std::vector<std::size_t> idx(n_, 0);
    std::vector<double> x(n_, xs[0]);
    CompensatedComplexSum acc;
    while (true) {
        double w = 1;
        for (std::size_t j = 0; j < n_; ++j) w *= ws[idx[j]];
        acc.add(unit_phase(phase(x, tau)) * w);
        std::size_t j = n_;
        while (j > 0) {
            --j;
            if (++idx[j] < per_dim) {
                x[j] = xs[idx[j]];
                break;
            }
            idx[j] = 0;
            x[j] = xs[0];
            if (j == 0) return acc.value();
        }
    }
}

cplx CubeIntegrator::qmc_integral(const std::vector<double>& tau, std::size_t points) const {
    boost::random::sobol gen(n_);
    const double scale = std::ldexp(1.0, -64);
    std::vector<double> x(n_);
    CompensatedComplexSum acc;
    for (std::size_t i = 0; i < points; ++i) {
        for (auto& v : x) v = (double)gen() * scale;
        acc.add(unit_phase(phase(x, tau)));
    }
    return acc.value() / (double)points;
}

cplx CubeIntegrator::value(const std::vector<double>& tau, bool fine) const {
    if (tau.size() != r_) throw InvalidInput("tau has " + std::to_string(tau.size()) + " entries, system has " + std::to_string(r_));
    if (std::all_of(tau.begin(), tau.end(), [](double t) { return t == 0.0; })) return 1.0;
    if (separable()) {
        cplx v = 1;
        for (const auto& b : blocks_) {
            cplx s = block_integral(b, tau, fine);
            for (unsigned e = 0; e < b.power; ++e) v *= s;
        }
        return v;
    }
    if (n_ <= 4) return tensor_integral(tau, fine);
    return qmc_integral(tau, fine ? (1u << 20) : (1u << 19));
}

OscillatoryIntegral CubeIntegrator::operator()(const std::vector<double>& tau) const {
    OscillatoryIntegral out;
    out.tau = tau;
    cplx fine = value(tau, true), coarse = value(tau, false);
    out.value = fine;
    out.quadrature.error = std::abs(fine - coarse);
    if (std::all_of(tau.begin(), tau.end(), [](double t) { return t == 0.0; })) {
        out.quadrature.rule = "exact";
        return out;
    }
    if (separable()) {
        out.quadrature.rule = "separable-gl";
        double cycles = 0;
        for (std::size_t k = 0; k < r_; ++k) cycles += std::abs(tau[k]) * grad_bound_[k];
        out.quadrature.nodes = (double)panels_for(cycles) * kFineNodes * (double)blocks_.size();
    } else if (n_ <= 4) {
        out.quadrature.rule = "tensor-gl";
        double cycles = 0;
        for (std::size_t k = 0; k < r_; ++k) cycles += std::abs(tau[k]) * grad_bound_[k];
        out.quadrature.nodes = std::pow((double)panels_for(cycles) * kFineNodes, (double)n_);
    } else {
        out.quadrature.rule = "sobol-qmc";
        out.quadrature.nodes = (double)(1u << 20);
    }
    return out;
}

OscillatoryIntegral cube_integral(const PolynomialSystem& sys, const std::vector<double>& tau) {
    return CubeIntegrator(sys)(tau);
}

// ---------------------------------------------------------------- singular integral

namespace {

struct Segment {
    cplx fine, coarse;
    double nodes = 0;
    double shell_max = 0;  // max |I(tau)| |tau|^{3/2} over the nodes
};

// int_a^b I(tau) e(-mu tau) dtau for r = 1 with the two rules.
Segment outer_segment(const CubeIntegrator& I, double mu, double a, double b) {
    double nu = I.value_bound()[0] + std::abs(mu);
    long panels = panels_for((b - a) * nu);
    Segment s;
    auto run = [&](bool fine) {
        return composite(a, b, panels, nodes_for(fine), [&](double t) {
            cplx v = I.value({t}, fine);
            if (fine) s.shell_max = std::max(s.shell_max, std::abs(v) * std::pow(t, 1.5));
            return v * unit_phase(-mu * t);
        });
    };
    s.fine = run(true);
    s.coarse = run(false);
    s.nodes = (double)panels * (kFineNodes + kCoarseNodes);
    return s;
}

SingularIntegralEstimate box_integral(const CubeIntegrator& I, const std::vector<double>& mu, double Phi, double budget) {
    std::size_t r = mu.size();
    std::vector<long> panels(r);
    double total = 1;
    for (std::size_t k = 0; k < r; ++k) {
        panels[k] = panels_for(2 * Phi * (I.value_bound()[k] + std::abs(mu[k])));
        total *= (double)panels[k] * kFineNodes;
    }
    if (total > budget)
        throw BudgetExceeded("outer quadrature needs " + std::to_string((long long)total) + " nodes, budget " +
                             std::to_string((long long)budget));
    if (!I.separable() && total > 200)
        throw BudgetExceeded("outer quadrature over a non-separable cube integral is limited to 200 nodes");
    SingularIntegralEstimate est;
    est.mu = mu;
    est.Phi = Phi;
    cplx vals[2];
    double Phi_half = Phi / 2, shell = 0;
    for (int pass = 0; pass < 2; ++pass) {
        bool fine = pass == 0;
        int m = nodes_for(fine);
        const GaussRule& g = gauss_legendre(m);
        std::vector<std::vector<double>> xs(r), ws(r);
        for (std::size_t k = 0; k < r; ++k) {
            double h = 2 * Phi / (double)panels[k];
            for (long p = 0; p < panels[k]; ++p)
                for (int i = 0; i < m; ++i) {
                    xs[k].push_back(-Phi + (p + 0.5) * h + 0.5 * h * g.nodes[i]);
                    ws[k].push_back(0.5 * h * g.weights[i]);
                }
        }
        std::vector<std::size_t> idx(r, 0);
        std::vector<double> tau(r);
        CompensatedComplexSum acc;
        bool done = false;
        while (!done) {
            double w = 1, ph = 0, norm = 0;
            for (std::size_t k = 0; k < r; ++k) {
                tau[k] = xs[k][idx[k]];
                w *= ws[k][idx[k]];
                ph += mu[k] * tau[k];
                norm = std::max(norm, std::abs(tau[k]));
            }
            cplx v = I.value(tau, fine);
            if (fine && norm >= Phi_half) shell = std::max(shell, std::abs(v) * std::pow(norm, (double)r + 0.5));
            acc.add(v * unit_phase(-ph) * w);
            std::size_t k = r;
            while (true) {
                if (k == 0) {
                    done = true;
                    break;
                }
                --k;
                if (++idx[k] < xs[k].size()) break;
                idx[k] = 0;
            }
        }
        vals[pass] = acc.value();
    }
    est.value = vals[0].real();
    est.imag = vals[0].imag();
    est.quadrature_error = std::abs(vals[0] - vals[1]);
    est.imag_flagged = std::abs(est.imag) > std::max(1e-8, 10 * est.quadrature_error);
    est.tail_constant = 4.0 * (double)r * std::pow(2.0, (double)r - 1) * shell;
    est.tail_bound = est.tail_constant / std::sqrt(Phi);
    est.nodes = total;
    return est;
}

}  // namespace

std::vector<SingularIntegralEstimate> singular_integral_ladder(const PolynomialSystem& sys, const std::vector<double>& mu,
                                                               const std::vector<double>& Phis, double budget,
                                                               double stop_tail) {
    CubeIntegrator I(sys);
    if (mu.size() != sys.size()) throw InvalidInput("mu has " + std::to_string(mu.size()) + " entries, system has " + std::to_string(sys.size()));
    for (std::size_t i = 0; i < Phis.size(); ++i) {
        if (!(Phis[i] > 0)) throw InvalidInput("Phi must be positive");
        if (i && Phis[i] <= Phis[i - 1]) throw InvalidInput("Phi ladder must increase");
    }
    std::vector<SingularIntegralEstimate> out;
    if (sys.size() != 1) {
        for (double Phi : Phis) {
            out.push_back(box_integral(I, mu, Phi, budget));
            if (out.back().tail_bound <= stop_tail) break;
        }
        return out;
    }
    // r = 1: J = 2 Re int_0^Phi I(tau) e(-mu tau) dtau, accumulated segment by segment
    cplx fine = 0, coarse = 0;
    double nodes = 0, prev = 0;
    for (double Phi : Phis) {
        // the shell [Phi/2, Phi] sets the tail constant; split there so its nodes are known
        double mid = std::max(prev, Phi / 2);
        double shell = 0;
        for (auto [a, b] : {std::pair{prev, mid}, std::pair{mid, Phi}}) {
            if (b <= a) continue;
            double nu = I.value_bound()[0] + std::abs(mu[0]);
            if (nodes + (double)panels_for((b - a) * nu) * kFineNodes > budget)
                throw BudgetExceeded("outer quadrature exceeds " + std::to_string((long long)budget) + " nodes");
            Segment s = outer_segment(I, mu[0], a, b);
            fine += s.fine;
            coarse += s.coarse;
            nodes += s.nodes;
            if (a >= Phi / 2) shell = std::max(shell, s.shell_max);
        }
        prev = Phi;
        SingularIntegralEstimate est;
        est.mu = mu;
        est.Phi = Phi;
        est.value = 2 * fine.real();
        est.quadrature_error = 2 * std::abs(fine - coarse);
        est.tail_constant = 4.0 * shell;
        est.tail_bound = est.tail_constant / std::sqrt(Phi);
        est.nodes = nodes;
        out.push_back(est);
        if (est.tail_bound <= stop_tail) break;
    }
    return out;
}

SingularIntegralEstimate singular_integral(const PolynomialSystem& sys, const std::vector<double>& mu, double Phi, double budget) {
    return singular_integral_ladder(sys, mu, {Phi}, budget).front();
}

MuInfinity mu_infinity(const PolynomialSystem& sys, const std::vector<double>& s, double N, double Phi_max) {
    if (!(N > 0)) throw InvalidInput("mu_infinity: N must be positive");
    CubeIntegrator I(sys);
    MuInfinity out;
    double scale = std::pow(N, (double)I.degree());
    for (double v : s) out.mu.push_back(v / scale);
    if (out.mu.size() != sys.size()) throw InvalidInput("s has " + std::to_string(s.size()) + " entries, system has " + std::to_string(sys.size()));
    out.t = out.mu.empty() ? 0 : out.mu[0];
    std::vector<double> Phis;
    for (double Phi = 4; Phi <= Phi_max; Phi *= 2) Phis.push_back(Phi);
    if (Phis.empty()) throw InvalidInput("mu_infinity: Phi_max must be at least 4");
    out.ladder = singular_integral_ladder(sys, out.mu, Phis, 4e6, 1e-3);
    out.converged = out.ladder.back().tail_bound <= 1e-3;
    const auto& last = out.ladder.back();
    out.value = last.value;
    out.Phi_star = last.Phi;
    out.tail_bound = last.tail_bound;
    return out;
}

}  // namespace cm
