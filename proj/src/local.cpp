#include "cm/local.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>

#include "cm/ntheory.hpp"

namespace cm {

namespace {

u64 reduce(const mpz_class& c, u64 q) { return mpz_fdiv_ui(c.get_mpz_t(), q); }
u64 reduce(i64 c, u64 q) { return (u64)mod_floor(c, (i64)q); }

void check_modulus(u64 q) {
    if (q == 0) throw InvalidInput("modulus must be positive");
    if (q >= (1ULL << 32)) throw InvalidInput("modulus must be below 2^32");
}

double pow_units(u64 q, std::size_t n) { return std::pow((double)euler_phi(q), (double)n); }

// Calls fn(g) for every g in U_q^n (lexicographic in the unit list).
template <class Fn>
void for_each_unit_tuple(u64 q, std::size_t n, u64 budget, Fn&& fn) {
    std::vector<u64> U = unit_residues(q);
    double total = std::pow((double)U.size(), (double)n);
    if (total > (double)budget)
        throw BudgetExceeded("enumeration of U_" + std::to_string(q) + "^" + std::to_string(n) + " needs " +
                             std::to_string((long double)total) + " points, budget " + std::to_string(budget));
    std::vector<std::size_t> idx(n, 0);
    std::vector<u64> g(n, U[0]);
    while (true) {
        if (!fn(g)) return;
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++idx[i] < U.size()) {
                g[i] = U[idx[i]];
                break;
            }
            idx[i] = 0;
            g[i] = U[0];
            if (i == 0) return;
        }
        if (n == 0) return;
    }
}

// Value tuple of one separable block at g, mod q.
std::vector<u64> block_values(const std::vector<std::vector<mpz_class>>& uni, u64 g, u64 q) {
    std::vector<u64> v(uni.size(), 0);
    for (std::size_t k = 0; k < uni.size(); ++k) {
        u64 acc = 0, pw = 1 % q;
        for (std::size_t e = 1; e < uni[k].size(); ++e) {
            pw = mulmod(pw, g % q, q);
            if (uni[k][e] != 0) acc = (acc + mulmod(reduce(uni[k][e], q), pw, q)) % q;
        }
        v[k] = acc;
    }
    return v;
}

// Connected components of the graph joining variables that appear in a common monomial; sorted.
std::vector<std::vector<std::size_t>> variable_blocks(const PolynomialSystem& sys) {
    std::size_t n = sys.nvars();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const auto& p : sys.polys())
        for (const auto& [m, c] : p.terms()) {
            std::size_t first = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (!m.exps[j]) continue;
                if (first == n) first = j;
                else parent[find(j)] = find(first);
            }
        }
    std::map<std::size_t, std::vector<std::size_t>> comp;
    for (std::size_t j = 0; j < n; ++j) comp[find(j)].push_back(j);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, vars] : comp) out.push_back(std::move(vars));
    return out;
}

u64 encode(const std::vector<u64>& v, u64 q) {
    u64 key = 0;
    for (u64 x : v) key = key * q + x;
    return key;
}

}  // namespace

// ---------------------------------------------------------------- residue sums

ResidueModel::ResidueModel(const PolynomialSystem& sys, u64 q, u64 budget)
    : q_(q), n_(sys.nvars()), r_(sys.size()), roots_(q), units_power_(pow_units(q, sys.nvars())) {
    check_modulus(q);
    std::vector<u64> U = unit_residues(q);
    auto sep = separable_parts(sys);
    if (sep) {
        for (std::size_t k = 0; k < r_; ++k) const_mod_.push_back(reduce(sep->constants[k], q));
        std::vector<std::size_t> owner(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t j = 0;
            while (j < i && !(sep->univariate[j] == sep->univariate[i])) ++j;
            owner[i] = j;
        }
        std::map<std::size_t, std::size_t> slot;
        for (std::size_t i = 0; i < n_; ++i) {
            if (owner[i] != i) {
                factors_[slot[owner[i]]].power += 1;
                continue;
            }
            std::map<std::vector<u64>, u64> h;
            for (u64 g : U) h[block_values(sep->univariate[i], g, q)] += 1;
            Factor f;
            f.hist.assign(h.begin(), h.end());
            slot[i] = factors_.size();
            factors_.push_back(std::move(f));
        }
        return;
    }
    // variables that share a monomial are enumerated together; independent blocks multiply
    const_mod_.assign(r_, 0);
    for (std::size_t k = 0; k < r_; ++k) const_mod_[k] = reduce(sys[k].coefficient(Monomial(n_)), q);
    double keyspace = std::pow((double)q, (double)r_);
    if (keyspace > 1.8e19) throw BudgetExceeded("value space q^r too large");
    auto blocks = variable_blocks(sys);
    double work = 0;
    for (const auto& b : blocks) work += std::pow((double)U.size(), (double)b.size());
    if (work > (double)budget)
        throw BudgetExceeded("enumeration of U_" + std::to_string(q) + " over variable blocks needs " +
                             std::to_string((long double)work) + " points, budget " + std::to_string(budget));
    for (const auto& b : blocks) {
        std::vector<Polynomial> ps;
        for (std::size_t k = 0; k < r_; ++k) {
            Polynomial p(b.size());
            for (const auto& [m, c] : sys[k].terms()) {
                std::size_t first = 0;
                while (first < n_ && m.exps[first] == 0) ++first;
                if (first == n_ || !std::binary_search(b.begin(), b.end(), first)) continue;
                Monomial mm(b.size());
                for (std::size_t j = 0; j < b.size(); ++j) mm.exps[j] = m.exps[b[j]];
                p.add_term(mm, c);
            }
            ps.push_back(std::move(p));
        }
        CompiledSystem cs(PolynomialSystem(b.size(), std::move(ps)));
        auto cm = cs.coefficients_mod(q);
        std::vector<u64> out(r_);
        std::unordered_map<u64, u64> h;
        std::map<u64, std::vector<u64>> decode;
        for_each_unit_tuple(q, b.size(), budget, [&](const std::vector<u64>& g) {
            cs.eval_mod(g.data(), q, cm, out.data());
            u64 key = encode(out, q);
            if (h[key]++ == 0) decode[key] = out;
            return true;
        });
        Factor f;
        for (const auto& [key, v] : decode) f.hist.emplace_back(v, h[key]);
        factors_.push_back(std::move(f));
    }
}

cplx ResidueModel::factor_sum(const Factor& f, const std::vector<u64>& a) const {
    CompensatedComplexSum s;
    for (const auto& [v, cnt] : f.hist) {
        u64 ph = 0;
        for (std::size_t k = 0; k < r_; ++k) ph = (ph + mulmod(a[k], v[k], q_)) % q_;
        s.add(roots_[ph] * (double)cnt);
    }
    return s.value();
}

cplx ResidueModel::W(const std::vector<u64>& a) const {
    if (a.size() != r_) throw InvalidInput("residue sum: a has " + std::to_string(a.size()) + " entries, system has " + std::to_string(r_));
    for (u64 x : a)
        if (x >= q_) throw InvalidInput("residue sum: a is not reduced mod " + std::to_string(q_));
    u64 ph = 0;
    for (std::size_t k = 0; k < r_; ++k) ph = (ph + mulmod(a[k], const_mod_[k], q_)) % q_;
    cplx v = roots_[ph];
    for (const auto& f : factors_) {
        cplx s = factor_sum(f, a), p = 1;
        for (unsigned e = 0; e < f.power; ++e) p *= s;
        v *= p;
    }
    return v;
}

ResidueSum residue_sum(const PolynomialSystem& sys, u64 q, const std::vector<u64>& a, u64 budget) {
    ResidueModel m(sys, q, budget);
    ResidueSum rs;
    rs.q = q;
    rs.a = a;
    rs.value = m.W(a);
    rs.n_terms = m.units_power();
    return rs;
}

std::vector<std::vector<u64>> primitive_tuples(u64 q, std::size_t r) {
    std::vector<std::vector<u64>> out;
    if (q == 1) {
        out.emplace_back(r, 0);
        return out;
    }
    std::vector<u64> a(r, 0);
    while (true) {
        u64 g = q;
        for (u64 x : a) g = std::gcd(g, x);
        if (g == 1) out.push_back(a);
        std::size_t i = r;
        while (i > 0 && ++a[i - 1] == q) a[--i] = 0;
        if (i == 0) break;
    }
    return out;
}

BValue b_coefficient(const ResidueModel& model, const std::vector<i64>& s) {
    u64 q = model.modulus();
    std::size_t r = model.forms();
    if (s.size() != r) throw InvalidInput("target s has " + std::to_string(s.size()) + " entries, system has " + std::to_string(r));
    RootTable roots(q);
    std::vector<u64> sm;
    for (i64 x : s) sm.push_back(reduce(x, q));
    CompensatedComplexSum acc;
    for (const auto& a : primitive_tuples(q, r)) {
        u64 ph = 0;
        for (std::size_t k = 0; k < r; ++k) ph = (ph + mulmod(a[k], sm[k], q)) % q;
        acc.add(model.W(a) * roots[(q - ph) % q]);
    }
    cplx v = acc.value() / model.units_power();
    BValue b;
    b.value = v.real();
    b.imag = v.imag();
    b.imag_flagged = std::abs(v.imag()) > 1e-9;
    return b;
}

BValue b_coefficient(const PolynomialSystem& sys, const std::vector<i64>& s, u64 q, u64 budget) {
    if (q == 1) return BValue{1.0, 0.0, false};
    return b_coefficient(ResidueModel(sys, q, budget), s);
}

// ---------------------------------------------------------------- counts and local factors

mpz_class unit_solution_count(const PolynomialSystem& sys, const std::vector<i64>& s, u64 q, u64 budget) {
    check_modulus(q);
    std::size_t n = sys.nvars(), r = sys.size();
    if (s.size() != r) throw InvalidInput("target s has " + std::to_string(s.size()) + " entries, system has " + std::to_string(r));
    std::vector<u64> target;
    for (i64 x : s) target.push_back(reduce(x, q));
    auto sep = separable_parts(sys);
    double states = std::pow((double)q, (double)r);
    if (sep && states <= (double)(1 << 22)) {
        // convolve per-variable value histograms over (Z/q)^r
        std::vector<u64> U = unit_residues(q);
        std::vector<u64> c0;
        for (std::size_t k = 0; k < r; ++k) c0.push_back(reduce(sep->constants[k], q));
        std::size_t S = (std::size_t)states;
        std::vector<mpz_class> dist(S, 0);
        dist[encode(c0, q)] = 1;
        std::vector<std::vector<u64>> digits(S, std::vector<u64>(r));
        for (std::size_t key = 0; key < S; ++key) {
            u64 x = key;
            for (std::size_t k = r; k-- > 0;) {
                digits[key][k] = x % q;
                x /= q;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::map<std::vector<u64>, u64> h;
            for (u64 g : U) h[block_values(sep->univariate[i], g, q)] += 1;
            std::vector<mpz_class> next(S, 0);
            std::vector<u64> sum(r);
            for (std::size_t key = 0; key < S; ++key) {
                if (dist[key] == 0) continue;
                for (const auto& [v, cnt] : h) {
                    for (std::size_t k = 0; k < r; ++k) sum[k] = (digits[key][k] + v[k]) % q;
                    next[encode(sum, q)] += dist[key] * cnt;
                }
            }
            dist.swap(next);
        }
        return dist[encode(target, q)];
    }
    CompiledSystem cs(sys);
    auto cm = cs.coefficients_mod(q);
    std::vector<u64> out(r);
    mpz_class count = 0;
    u64 c = 0;
    for_each_unit_tuple(q, n, budget, [&](const std::vector<u64>& g) {
        cs.eval_mod(g.data(), q, cm, out.data());
        if (out == target) ++c;
        return true;
    });
    count = (unsigned long)c;
    return count;
}

LocalFactorEstimate local_factor(const PolynomialSystem& sys, const std::vector<i64>& s, u64 p, int t_max, u64 budget) {
    if (!is_prime(p)) throw InvalidInput("local_factor: " + std::to_string(p) + " is not prime");
    if (t_max < 1) throw InvalidInput("local_factor: t_max must be at least 1");
    LocalFactorEstimate est;
    est.p = p;
    std::size_t n = sys.nvars(), r = sys.size();
    u64 q = 1;
    for (int t = 1; t <= t_max; ++t) {
        if (q > ((1ULL << 32) - 1) / p) {
            est.partial = true;
            est.note = "p^t reached 2^32";
            break;
        }
        q *= p;
        LocalTerm term;
        term.t = t;
        try {
            term.count = unit_solution_count(sys, s, q, budget);
        } catch (const BudgetExceeded& e) {
            est.partial = true;
            est.note = e.what();
            break;
        }
        mpz_class qr, ph;
        mpz_ui_pow_ui(qr.get_mpz_t(), q, r);
        mpz_ui_pow_ui(ph.get_mpz_t(), euler_phi(q), n);
        term.normalized = mpq_class(qr * term.count, ph);
        term.normalized.canonicalize();
        est.terms.push_back(term);
    }
    for (std::size_t i = 1; i < est.terms.size(); ++i)
        if (est.terms[i].normalized == est.terms[i - 1].normalized) {
            est.stabilized = true;
            est.t_star = est.terms[i - 1].t;
            break;
        }
    return est;
}

// ---------------------------------------------------------------- singular series

SingularSeriesEstimate singular_series(const PolynomialSystem& sys, const std::vector<i64>& s, u64 Q, u64 budget) {
    if (Q < 1) throw InvalidInput("singular_series: Q must be at least 1");
    SingularSeriesEstimate est;
    est.s = s;
    est.Q = Q;
    est.per_q[1] = 1.0;
    CompensatedSum total;
    total.add(1.0);
    for (u64 q = 2; q <= Q; ++q) {
        BValue b = b_coefficient(sys, s, q, budget);
        est.per_q[q] = b.value;
        est.flagged += b.imag_flagged;
        total.add(b.value);
    }
    est.value = total.value();
    double euler = 1.0;
    for (u64 p = 2; p <= Q; ++p) {
        if (!is_prime(p)) continue;
        CompensatedSum f;
        f.add(1.0);
        for (u64 pt = p; pt <= Q; pt *= p) {
            f.add(est.per_q[pt]);
            if (pt > Q / p) break;
        }
        est.factors[p] = f.value();
        euler *= f.value();
        // a local factor is a scaled count; treat round-off sized values as zero
        if (std::abs(f.value()) < 1e-12) est.zero_factor = true;
    }
    est.euler = est.zero_factor ? 0.0 : euler;
    return est;
}

// ---------------------------------------------------------------- local solubility

std::string to_string(SolubilityKind k) {
    switch (k) {
        case SolubilityKind::nonsingular_solution_found: return "nonsingular-solution-found";
        case SolubilityKind::no_solution_mod: return "no-solution-mod";
        case SolubilityKind::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

int valuation(mpz_class x, u64 p) {
    if (x == 0) return 1 << 29;
    mpz_class pp = (unsigned long)p;
    return (int)mpz_remove(x.get_mpz_t(), x.get_mpz_t(), pp.get_mpz_t());
}

mpz_class det(std::vector<std::vector<mpz_class>> m) {
    std::size_t k = m.size();
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        while (piv < k && m[piv][c] == 0) ++piv;
        if (piv == k) return 0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            sign = -sign;
        }
        for (std::size_t i = c + 1; i < k; ++i) {
            for (std::size_t j = c + 1; j < k; ++j) {
                m[i][j] = m[c][c] * m[i][j] - m[i][c] * m[c][j];
                mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            m[i][c] = 0;
        }
        prev = m[c][c];
    }
    return sign * m[k - 1][k - 1];
}

// Smallest valuation over r x r minors of the Jacobian at g.
std::pair<int, std::vector<std::size_t>> best_minor(const std::vector<std::vector<Polynomial>>& J,
                                                    const std::vector<u64>& g, u64 p) {
    std::size_t r = J.size(), n = g.size();
    std::vector<mpz_class> x;
    for (u64 v : g) x.emplace_back((unsigned long)v);
    std::vector<std::vector<mpz_class>> M(r, std::vector<mpz_class>(n));
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t j = 0; j < n; ++j) M[k][j] = J[k][j].evaluate(x);
    int best = 1 << 29;
    std::vector<std::size_t> best_cols;
    if (r > n) return {best, best_cols};
    std::vector<bool> sel(n, false);
    std::fill(sel.begin(), sel.begin() + (long)r, true);
    do {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < n; ++j)
            if (sel[j]) cols.push_back(j);
        std::vector<std::vector<mpz_class>> sub(r, std::vector<mpz_class>(r));
        for (std::size_t k = 0; k < r; ++k)
            for (std::size_t c = 0; c < r; ++c) sub[k][c] = M[k][cols[c]];
        int v = valuation(det(sub), p);
        if (v < best) {
            best = v;
            best_cols = cols;
        }
    } while (std::prev_permutation(sel.begin(), sel.end()) && best > 0);
    return {best, best_cols};
}

}  // namespace

SolubilityVerdict local_solubility(const PolynomialSystem& sys, const std::vector<i64>& s, u64 p, int t_cap, u64 budget) {
    if (!is_prime(p)) throw InvalidInput("local_solubility: " + std::to_string(p) + " is not prime");
    std::size_t n = sys.nvars(), r = sys.size();
    if (s.size() != r) throw InvalidInput("target s has " + std::to_string(s.size()) + " entries, system has " + std::to_string(r));
    SolubilityVerdict v;
    auto J = jacobian(sys);
    CompiledSystem cs(sys);
    u64 q = 1;
    for (int t = 1; t <= t_cap; ++t) {
        if (q > ((1ULL << 31) - 1) / p) break;
        q *= p;
        auto cm = cs.coefficients_mod(q);
        std::vector<u64> target, out(r);
        for (i64 x : s) target.push_back(reduce(x, q));
        bool any = false, found = false;
        try {
            for_each_unit_tuple(q, n, budget, [&](const std::vector<u64>& g) {
                cs.eval_mod(g.data(), q, cm, out.data());
                if (out != target) return true;
                any = true;
                auto [k, cols] = best_minor(J, g, p);
                if (t >= 2 * k + 1) {
                    found = true;
                    v.witness = g;
                    v.minor_valuation = k;
                    v.minor_columns = cols;
                    return false;
                }
                return true;
            });
        } catch (const BudgetExceeded&) {
            v.kind = SolubilityKind::inconclusive;
            v.t = t;
            return v;
        }
        if (!any) {
            v.kind = SolubilityKind::no_solution_mod;
            v.t = t;
            return v;
        }
        if (found) {
            v.kind = SolubilityKind::nonsingular_solution_found;
            v.t = t;
            break;
        }
    }
    if (v.kind != SolubilityKind::nonsingular_solution_found) {
        v.t = t_cap;
        return v;
    }
    // Hensel steps: adjust the minor's columns by multiples of p^{t-k}.
    std::vector<u64> g = v.witness;
    u64 qt = q;
    int k = v.minor_valuation;
    for (int step = 0; step < 3; ++step) {
        if (qt > ((1ULL << 31) - 1) / p) break;
        u64 qn = qt * p;
        u64 shift = 1;
        for (int i = 0; i < v.t + step - k; ++i) shift *= p;
        u64 range = 1;
        for (int i = 0; i <= k; ++i) range *= p;
        double space = std::pow((double)range, (double)r);
        if (space > 1e6) break;
        auto cm = cs.coefficients_mod(qn);
        std::vector<u64> target, out(r), trial = g;
        for (i64 x : s) target.push_back(reduce(x, qn));
        std::vector<u64> u(r, 0);
        bool ok = false;
        while (true) {
            for (std::size_t c = 0; c < r; ++c) trial[v.minor_columns[c]] = (g[v.minor_columns[c]] + u[c] * shift) % qn;
            cs.eval_mod(trial.data(), qn, cm, out.data());
            if (out == target) {
                ok = true;
                break;
            }
            std::size_t i = r;
            while (i > 0 && ++u[i - 1] == range) u[--i] = 0;
            if (i == 0) break;
        }
        if (!ok) break;
        g = trial;
        qt = qn;
        ++v.lifts_verified;
    }
    return v;
}

}  // namespace cm
