#include "cm/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/sobol.hpp>

#include "cm/archimedean.hpp"
#include "cm/error.hpp"
#include "cm/local.hpp"
#include "cm/ntheory.hpp"

namespace cm {

double ArcParams::L() const { return std::pow(std::log((double)N), C); }

void ArcParams::validate() const {
    if (N < 2) throw InvalidInput("arc parameters: N must be at least 2");
    if (d < 1) throw InvalidInput("arc parameters: d must be at least 1");
    if (r < 1) throw InvalidInput("arc parameters: r must be at least 1");
    if (!(C > 0)) throw InvalidInput("arc parameters: C must be positive");
    if (!(L() < std::pow((double)N, d) / 2))
        throw InvalidInput("arc parameters: (log N)^C = " + std::to_string(L()) + " is not below N^d / 2; major arcs would overlap");
}

std::string ArcVerdict::to_string() const {
    if (!major) return "minor";
    std::string s = "major(" + std::to_string(q) + ", [";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
    return s + "])";
}

namespace {

std::vector<double> radii(const ArcParams& p, ArcFlavor flavor, std::size_t dims) {
    p.validate();
    std::vector<double> rad;
    if (flavor == ArcFlavor::M) {
        if (dims != p.r) throw InvalidInput("classify: M-arcs take an r-tuple, got " + std::to_string(dims) + " coordinates");
        rad.assign(dims, std::pow((double)p.N, -(double)p.d) * p.L());
    } else {
        if (dims != (std::size_t)p.d) throw InvalidInput("classify: N-arcs take a d-tuple, got " + std::to_string(dims) + " coordinates");
        for (std::size_t i = 0; i < dims; ++i) rad.push_back(std::pow((double)p.N, -(double)(i + 1)) * p.L());
    }
    return rad;
}

// exact check of one candidate q; fills a
bool exact_box(const std::vector<mpq_class>& alpha, u64 q, const std::vector<double>& rad, std::vector<u64>& a) {
    a.assign(alpha.size(), 0);
    u64 g = q;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        mpq_class x = alpha[i] * (unsigned long)q + mpq_class(1, 2);
        mpz_class ai;
        mpz_fdiv_q(ai.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
        mpq_class dist = alpha[i] - mpq_class(ai, (unsigned long)q);
        if (dist < 0) dist = -dist;
        if (dist > mpq_class(rad[i])) return false;
        a[i] = mpz_fdiv_ui(ai.get_mpz_t(), q);
        g = std::gcd(g, a[i]);
    }
    return g == 1;
}

ArcVerdict classify_impl(const std::vector<mpq_class>& alpha, const std::vector<double>* approx, const ArcParams& params,
                         ArcFlavor flavor) {
    auto rad = radii(params, flavor, alpha.size());
    for (const auto& x : alpha)
        if (x < 0 || x >= 1) throw InvalidInput("classify: coordinates must lie in [0, 1)");
    ArcVerdict v;
    v.point = alpha;
    u64 Qmax = (u64)std::floor(params.L());
    std::vector<u64> a;
    for (u64 q = 1; q <= Qmax; ++q) {
        if (approx) {
            // cheap rejection; the exact test decides anything close
            bool close = true;
            for (std::size_t i = 0; i < alpha.size() && close; ++i) {
                double t = (*approx)[i] * (double)q;
                close = std::abs(t - std::round(t)) <= (rad[i] * 2 + 1e-9) * (double)q;
            }
            if (!close) continue;
        }
        if (exact_box(alpha, q, rad, a)) {
            v.major = true;
            v.q = q;
            v.a = a;
            return v;
        }
    }
    return v;
}

// e(frac(beta x^e)) with the product in extended precision
long double frac_product(long double beta, long double xe) {
    long double t = beta * xe;
    return t - std::floor(t);
}

cplx phase_ld(long double x) { return unit_phase((double)(x - std::floor(x))); }

}  // namespace

ArcVerdict classify(const std::vector<mpq_class>& alpha, const ArcParams& params, ArcFlavor flavor) {
    return classify_impl(alpha, nullptr, params, flavor);
}

ArcVerdict classify(const std::vector<double>& alpha, const ArcParams& params, ArcFlavor flavor) {
    std::vector<mpq_class> exact;
    for (double x : alpha) exact.emplace_back(x);
    return classify_impl(exact, &alpha, params, flavor);
}

cplx s0_sum(const SieveTable& table, const std::vector<double>& beta, u64 N) {
    if (N > table.N()) throw InvalidInput("s0_sum: sieve covers " + std::to_string(table.N()) + " < N = " + std::to_string(N));
    CompensatedComplexSum acc;
    for (u64 x : table.support()) {
        if (x > N) break;
        long double ph = 0, xe = 1;
        for (double b : beta) {
            xe *= (long double)x;
            ph += frac_product(b, xe);
        }
        acc.add(phase_ld(ph) * table.lambda(x));
    }
    return acc.value();
}

cplx s0_sum(const SieveTable& table, const std::vector<double>& beta) { return s0_sum(table, beta, table.N()); }

namespace {

void check_point(const PolynomialSystem& sys, const TorusPoint& alpha) {
    if (alpha.q == 0) throw InvalidInput("torus point: q must be positive");
    if (alpha.q >= (1ULL << 32)) throw InvalidInput("torus point: q must be below 2^32");
    if (alpha.a.size() != sys.size() || alpha.tau.size() != sys.size())
        throw InvalidInput("torus point: a and tau need " + std::to_string(sys.size()) + " entries");
}

// Values of one separable block: exact mod q and in extended precision.
struct BlockValues {
    std::vector<u64> mod;          // per form, value mod q
    std::vector<long double> val;  // per form
};

BlockValues block_values(const std::vector<std::vector<mpz_class>>& uni, u64 x, u64 q) {
    BlockValues b;
    for (const auto& row : uni) {
        u64 m = 0, pw = 1 % q;
        long double v = 0, xe = 1;
        for (std::size_t e = 1; e < row.size(); ++e) {
            pw = mulmod(pw, x % q, q);
            xe *= (long double)x;
            if (row[e] == 0) continue;
            m = (m + mulmod(mpz_fdiv_ui(row[e].get_mpz_t(), q), pw, q)) % q;
            v += (long double)row[e].get_d() * xe;
        }
        b.mod.push_back(m);
        b.val.push_back(v);
    }
    return b;
}

cplx point_phase(const std::vector<u64>& vmod, const std::vector<long double>& val, const TorusPoint& alpha,
                 const std::vector<u64>& amod, const RootTable& roots) {
    u64 q = alpha.q, k = 0;
    long double t = 0;
    for (std::size_t j = 0; j < vmod.size(); ++j) {
        k = (k + mulmod(amod[j], vmod[j], q)) % q;
        if (alpha.tau[j] != 0) t += val[j] * (long double)alpha.tau[j];
    }
    return roots[k] * phase_ld(t);
}

}  // namespace

cplx t_sum(const PolynomialSystem& sys, const SieveTable& table, u64 N, const TorusPoint& alpha, double budget) {
    check_point(sys, alpha);
    if (N > table.N()) throw InvalidInput("t_sum: sieve covers " + std::to_string(table.N()) + " < N = " + std::to_string(N));
    std::size_t n = sys.nvars(), r = sys.size();
    u64 q = alpha.q;
    RootTable roots(q);
    std::vector<u64> amod;
    for (i64 v : alpha.a) amod.push_back((u64)mod_floor(v, (i64)q));
    std::vector<u64> pts;
    for (u64 x : table.support())
        if (x <= N) pts.push_back(x);
    auto sep = separable_parts(sys);
    if (sep) {
        std::vector<u64> cmod;
        std::vector<long double> cval;
        for (const auto& c : sep->constants) {
            cmod.push_back(mpz_fdiv_ui(c.get_mpz_t(), q));
            cval.push_back((long double)c.get_d());
        }
        cplx total = point_phase(cmod, cval, alpha, amod, roots);
        std::vector<std::vector<std::vector<mpz_class>>> seen;
        std::vector<cplx> sums;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& u = sep->univariate[i];
            std::size_t j = 0;
            while (j < seen.size() && !(seen[j] == u)) ++j;
            if (j == seen.size()) {
                CompensatedComplexSum acc;
                for (u64 x : pts) {
                    BlockValues b = block_values(u, x, q);
                    acc.add(point_phase(b.mod, b.val, alpha, amod, roots) * table.lambda(x));
                }
                seen.push_back(u);
                sums.push_back(acc.value());
            }
            total *= sums[j];
        }
        return total;
    }
    if (std::pow((double)pts.size(), (double)n) > budget)
        throw BudgetExceeded("t_sum: " + std::to_string(pts.size()) + "^" + std::to_string(n) + " support points exceed the budget");
    CompiledSystem cs(sys);
    bool small = cs.fits_i64(N);
    std::vector<i64> x(n, (i64)pts[0]), out(r);
    std::vector<mpz_class> outz(r);
    std::vector<u64> vmod(r);
    std::vector<long double> val(r);
    std::vector<std::size_t> idx(n, 0);
    CompensatedComplexSum acc;
    while (true) {
        if (small) {
            cs.eval_i64(x.data(), out.data());
            for (std::size_t k = 0; k < r; ++k) {
                vmod[k] = (u64)mod_floor(out[k], (i64)q);
                val[k] = (long double)out[k];
            }
        } else {
            cs.eval_mpz(x.data(), outz.data());
            for (std::size_t k = 0; k < r; ++k) {
                vmod[k] = mpz_fdiv_ui(outz[k].get_mpz_t(), q);
                val[k] = (long double)outz[k].get_d();
            }
        }
        double w = 1;
        for (i64 v : x) w *= table.lambda((u64)v);
        acc.add(point_phase(vmod, val, alpha, amod, roots) * w);
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++idx[i] < pts.size()) {
                x[i] = (i64)pts[idx[i]];
                break;
            }
            idx[i] = 0;
            x[i] = (i64)pts[0];
            if (i == 0) return acc.value();
        }
    }
}

cplx t_sum(const PolynomialSystem& sys, const SieveTable& table, u64 N, const std::vector<double>& alpha, double budget) {
    TorusPoint p;
    p.q = 1;
    p.a.assign(alpha.size(), 0);
    p.tau = alpha;
    return t_sum(sys, table, N, p, budget);
}

cplx t_sum_by_residues(const PolynomialSystem& sys, const SieveTable& table, u64 N, const TorusPoint& alpha, double budget) {
    check_point(sys, alpha);
    if (N > table.N()) throw InvalidInput("t_sum_by_residues: sieve covers " + std::to_string(table.N()) + " < N = " + std::to_string(N));
    std::size_t n = sys.nvars(), r = sys.size();
    u64 q = alpha.q;
    RootTable roots(q);
    std::vector<u64> amod;
    for (i64 v : alpha.a) amod.push_back((u64)mod_floor(v, (i64)q));
    bool tau_zero = std::all_of(alpha.tau.begin(), alpha.tau.end(), [](double t) { return t == 0.0; });
    if (tau_zero) {
        // psi(N; g, q) for each class g
        std::vector<CompensatedSum> cls(q);
        for (u64 x : table.support()) {
            if (x > N) break;
            cls[x % q].add(table.lambda(x));
        }
        std::vector<double> psi;
        for (auto& c : cls) psi.push_back(c.value());
        if (std::pow((double)q, (double)n) > budget) throw BudgetExceeded("t_sum_by_residues: q^n classes exceed the budget");
        CompiledSystem cs(sys);
        auto cm = cs.coefficients_mod(q);
        std::vector<u64> g(n, 0), out(r);
        CompensatedComplexSum acc;
        while (true) {
            double w = 1;
            for (u64 v : g) w *= psi[v];
            if (w != 0) {
                cs.eval_mod(g.data(), q, cm, out.data());
                u64 k = 0;
                for (std::size_t j = 0; j < r; ++j) k = (k + mulmod(amod[j], out[j], q)) % q;
                acc.add(roots[k] * w);
            }
            std::size_t i = n;
            while (i > 0 && ++g[i - 1] == q) g[--i] = 0;
            if (i == 0) return acc.value();
        }
    }
    auto sep = separable_parts(sys);
    if (!sep) throw InvalidInput("t_sum_by_residues: tau != 0 needs a separable system");
    cplx total = 1;
    {
        long double t = 0;
        u64 k = 0;
        for (std::size_t j = 0; j < r; ++j) {
            k = (k + mulmod(amod[j], mpz_fdiv_ui(sep->constants[j].get_mpz_t(), q), q)) % q;
            t += (long double)sep->constants[j].get_d() * (long double)alpha.tau[j];
        }
        total = roots[k] * phase_ld(t);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& u = sep->univariate[i];
        // class integrals sum_{x = g} Lambda(x) e(u(x) . tau), then the twist by e(u(g) . a/q)
        std::vector<CompensatedComplexSum> cls(q);
        for (u64 x : table.support()) {
            if (x > N) break;
            BlockValues b = block_values(u, x, q);
            long double t = 0;
            for (std::size_t j = 0; j < r; ++j) t += b.val[j] * (long double)alpha.tau[j];
            cls[x % q].add(phase_ld(t) * table.lambda(x));
        }
        CompensatedComplexSum acc;
        for (u64 g = 0; g < q; ++g) {
            BlockValues b = block_values(u, g, q);
            u64 k = 0;
            for (std::size_t j = 0; j < r; ++j) k = (k + mulmod(amod[j], b.mod[j], q)) % q;
            acc.add(roots[k] * cls[g].value());
        }
        total *= acc.value();
    }
    return total;
}

std::vector<MinorScanRow> minor_sup_scan(const SieveTable& table, double C, int d, const std::vector<u64>& ladder,
                                         long samples) {
    std::vector<MinorScanRow> rows;
    if (samples <= 0) return rows;
    if (d < 1) throw InvalidInput("minor_sup_scan: d must be at least 1");
    for (u64 N : ladder) {
        if (N > table.N()) throw InvalidInput("minor_sup_scan: sieve covers " + std::to_string(table.N()) + " < N = " + std::to_string(N));
        ArcParams p{N, C, d, 1};
        p.validate();
        MinorScanRow row;
        row.N = N;
        boost::random::sobol gen((std::size_t)d);
        const double scale = std::ldexp(1.0, -64);
        std::vector<double> beta((std::size_t)d);
        for (long i = 0; i < samples; ++i) {
            for (auto& b : beta) b = (double)gen() * scale;
            ++row.samples;
            if (classify(beta, p, ArcFlavor::N).major) continue;
            ++row.minor;
            double v = std::abs(s0_sum(table, beta, N)) / (double)N;
            if (v > row.sup_ratio) {
                row.sup_ratio = v;
                row.argmax = beta;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

cplx major_arc_main_term(const PolynomialSystem& sys, u64 N, double C, u64 q, const std::vector<i64>& a,
                         const std::vector<double>& tau) {
    PolynomialSystem top = sys.leading_forms();
    CubeIntegrator I(top);
    ArcParams p{N, C, I.degree(), sys.size()};
    p.validate();
    if (q < 1 || (double)q > p.L()) throw InvalidInput("major_arc_main_term: q must lie in [1, (log N)^C]");
    if (a.size() != sys.size() || tau.size() != sys.size()) throw InvalidInput("major_arc_main_term: a and tau need r entries");
    double Nd = std::pow((double)N, I.degree());
    for (double t : tau)
        if (std::abs(t) > p.L() / Nd) throw InvalidInput("major_arc_main_term: tau lies outside the major box");
    ResidueModel W(sys, q);
    std::vector<u64> amod;
    for (i64 v : a) amod.push_back((u64)mod_floor(v, (i64)q));
    std::vector<double> scaled;
    for (double t : tau) scaled.push_back(t * Nd);
    cplx cube = I(scaled).value;
    return W.W(amod) / W.units_power() * std::pow((double)N, (double)sys.nvars()) * cube;
}

}  // namespace cm
