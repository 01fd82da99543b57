#include "cm/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cm {

std::string to_string(RankMethod m) {
    switch (m) {
        case RankMethod::exact_linear: return "exact-linear";
        case RankMethod::exact_quadratic_matrix: return "exact-quadratic-matrix";
        case RankMethod::finite_field_estimate: return "finite-field-estimate";
        case RankMethod::decomposition_witness: return "decomposition-witness";
    }
    return "?";
}

bool ProductDecomposition::verify(const Polynomial& form) const {
    Polynomial rhs = W;
    for (std::size_t i = 0; i < coef.size(); ++i) rhs += (U[i] * V[i]) * coef[i];
    return form * scale == rhs;
}

ZMatrix linear_coefficients(const PolynomialSystem& sys) {
    std::size_t n = sys.nvars();
    ZMatrix A(sys.size(), std::vector<mpz_class>(n, 0));
    for (std::size_t k = 0; k < sys.size(); ++k) {
        for (const auto& [m, c] : sys[k].terms()) {
            if (m.degree() != 1)
                throw InvalidInput("member " + std::to_string(k) + " is not a homogeneous linear form");
            for (std::size_t j = 0; j < n; ++j)
                if (m.exps[j]) A[k][j] = c;
        }
    }
    return A;
}

Polynomial linear_form(std::size_t n, const std::vector<mpz_class>& coeffs) {
    Polynomial p(n);
    for (std::size_t j = 0; j < n; ++j) {
        Monomial m(n);
        m.exps[j] = 1;
        p.add_term(m, coeffs[j]);
    }
    return p;
}

Polynomial linear_form(std::size_t n, const QVector& coeffs, mpq_class* factor) {
    // coeffs = factor * (primitive integer vector)
    std::vector<mpz_class> prim = primitive_integer(coeffs);
    mpq_class f = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (prim[j] != 0) {
            f = coeffs[j] / mpq_class(prim[j]);
            break;
        }
    if (factor) *factor = f;
    return linear_form(n, prim);
}

QMatrix quadratic_matrix(const Polynomial& form) {
    std::size_t n = form.nvars();
    QMatrix A(n, QVector(n, 0));
    for (const auto& [m, c] : form.terms()) {
        if (m.degree() != 2) throw InvalidInput("form is not a homogeneous quadratic");
        std::vector<std::size_t> vs;
        for (std::size_t j = 0; j < n; ++j)
            for (unsigned e = 0; e < m.exps[j]; ++e) vs.push_back(j);
        if (vs[0] == vs[1]) {
            A[vs[0]][vs[0]] = c;
        } else {
            A[vs[0]][vs[1]] = mpq_class(c, 2);
            A[vs[1]][vs[0]] = mpq_class(c, 2);
        }
    }
    return A;
}

Polynomial quadratic_from_matrix(const QMatrix& A, mpz_class* scale) {
    std::size_t n = A.size();
    mpz_class l = 1;
    for (const auto& row : A)
        for (const auto& x : row) l = lcm(l, x.get_den());
    if (scale) *scale = l;
    Polynomial p(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            mpq_class c = (i == j ? A[i][i] : 2 * A[i][j]) * l;
            if (c == 0) continue;
            Monomial m(n);
            m.exps[i] += 1;
            m.exps[j] += 1;
            p.add_term(m, c.get_num());
        }
    return p;
}

namespace {

void check_quadratic(const Polynomial& form, const char* op) {
    if (form.is_zero() || form.degree() != 2 || !form.is_homogeneous())
        throw InvalidInput(std::string(op) + ": expected a nonzero homogeneous quadratic form");
}

std::size_t matrix_rank_exact(const QMatrix& A) { return rank(A); }

// Columns j of A with lambda . A_j != 0.
std::vector<std::size_t> support_of(const QMatrix& A, const QVector& lambda) {
    std::vector<std::size_t> s;
    std::size_t n = A.empty() ? 0 : A[0].size();
    for (std::size_t j = 0; j < n; ++j) {
        mpq_class v = 0;
        for (std::size_t k = 0; k < A.size(); ++k) v += lambda[k] * A[k][j];
        if (v != 0) s.push_back(j);
    }
    return s;
}

QMatrix transpose_columns(const QMatrix& A, const std::vector<std::size_t>& cols) {
    QMatrix t;
    for (std::size_t j : cols) {
        QVector c;
        for (const auto& row : A) c.push_back(row[j]);
        t.push_back(std::move(c));
    }
    return t;
}

double log_binomial(std::size_t n, std::size_t k) {
    return std::lgamma((double)n + 1) - std::lgamma((double)k + 1) - std::lgamma((double)(n - k) + 1);
}

std::vector<mpz_class> to_mpz(const std::vector<long>& v) {
    std::vector<mpz_class> o;
    for (long x : v) o.emplace_back(x);
    return o;
}

}  // namespace

RankReport linear_rank(const PolynomialSystem& sys, unsigned long seed) {
    RankReport rep;
    rep.method = RankMethod::exact_linear;
    std::size_t r = sys.size(), n = sys.nvars();
    if (r == 0) {
        rep.lower = rep.upper = kInfiniteRank;
        rep.notes.push_back("empty system");
        return rep;
    }
    QMatrix A = to_rational(linear_coefficients(sys));
    RankWitness w;
    // Combination vanishing identically: rank deficiency.
    QMatrix At = transpose_columns(A, [&] {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        return all;
    }());
    QMatrix left_null = nullspace(At, r);
    if (!left_null.empty()) {
        w.lambda = primitive_integer(left_null[0]);
        rep.lower = rep.upper = 0;
        rep.witness = w;
        return rep;
    }
    std::size_t k = r - 1;
    long best = LONG_MAX;
    QVector best_lambda;
    if (log_binomial(n, k) <= std::log(2e6)) {
        // Every maximal vanishing set is a flat of rank r-1 spanned by r-1 columns.
        std::vector<std::size_t> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            QMatrix sub = transpose_columns(A, idx);  // k x r
            QMatrix ns = nullspace(sub, r);
            if (ns.size() == 1) {
                long s = (long)support_of(A, ns[0]).size();
                if (s < best) {
                    best = s;
                    best_lambda = ns[0];
                }
            }
            // next combination
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    } else if (n <= 24) {
        // Largest column set Z with rank(A_Z) < r, scanning sizes downward.
        for (long z = (long)n; z >= 0 && best == LONG_MAX; --z) {
            for (u64 mask = 0; mask < (1ULL << n); ++mask) {
                if (__builtin_popcountll(mask) != z) continue;
                std::vector<std::size_t> cols;
                for (std::size_t j = 0; j < n; ++j)
                    if (mask >> j & 1) cols.push_back(j);
                QMatrix sub = transpose_columns(A, cols);
                QMatrix ns = nullspace(sub, r);
                if (ns.empty()) continue;
                best = (long)n - z;
                best_lambda = ns[0];
                break;
            }
        }
    } else {
        // Annealed search over spanning (r-1)-subsets; only an upper bound is certified.
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> cur(n);
        std::iota(cur.begin(), cur.end(), 0);
        std::shuffle(cur.begin(), cur.end(), rng);
        {
            // start from independent columns so the first score is finite
            QMatrix shuffled = transpose_columns(A, cur);
            std::vector<std::size_t> keep = leftmost_independent_rows(shuffled);
            std::vector<std::size_t> start;
            for (std::size_t i = 0; i < k; ++i) start.push_back(cur[keep[i]]);
            cur = start;
        }
        auto score = [&](const std::vector<std::size_t>& s, QVector* lam) -> long {
            QMatrix ns = nullspace(transpose_columns(A, s), r);
            if (ns.size() != 1) return LONG_MAX;
            if (lam) *lam = ns[0];
            return (long)support_of(A, ns[0]).size();
        };
        QVector lam;
        long cur_score = score(cur, &lam);
        if (cur_score < best) { best = cur_score; best_lambda = lam; }
        std::uniform_real_distribution<double> U(0, 1);
        const int iters = 4000;
        for (int it = 0; it < iters; ++it) {
            double T = 2.0 * (1.0 - (double)it / iters) + 1e-3;
            auto nxt = cur;
            std::size_t pos = rng() % k, col = rng() % n;
            if (std::find(nxt.begin(), nxt.end(), col) != nxt.end()) continue;
            nxt[pos] = col;
            long s = score(nxt, &lam);
            if (s == LONG_MAX) continue;
            if (s <= cur_score || U(rng) < std::exp((double)(cur_score - s) / T)) {
                cur = nxt;
                cur_score = s;
                if (s < best) { best = s; best_lambda = lam; }
            }
        }
        rep.method = RankMethod::decomposition_witness;
        rep.lower = 1;
        rep.upper = best;
        w.lambda = primitive_integer(best_lambda);
        w.columns = support_of(A, best_lambda);
        rep.witness = w;
        rep.notes.push_back("annealed support search; lower bound only from full row rank");
        return rep;
    }
    rep.lower = rep.upper = best;
    w.lambda = primitive_integer(best_lambda);
    w.columns = support_of(A, best_lambda);
    rep.witness = w;
    return rep;
}

RankReport quadratic_birch_rank(const Polynomial& form) {
    check_quadratic(form, "quadratic_birch_rank");
    QMatrix A = quadratic_matrix(form);
    RankReport rep;
    rep.method = RankMethod::exact_quadratic_matrix;
    rep.lower = rep.upper = (long)matrix_rank_exact(A);
    return rep;
}

namespace {

struct RatTerm {
    mpq_class c;
    QVector u, v;
};

QVector unit_vec(std::size_t n, std::size_t i) {
    QVector e(n, 0);
    e[i] = 1;
    return e;
}

// A -= c * sym(u v^T)
void subtract_product(QMatrix& A, const mpq_class& c, const QVector& u, const QVector& v) {
    std::size_t n = A.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (u[i] == 0 && v[i] == 0) continue;
            mpq_class t = (u[i] * v[j] + v[i] * u[j]) / 2;
            if (t != 0) A[i][j] -= c * t;
        }
}

bool rational_sqrt(const mpq_class& x, mpq_class* root) {
    if (x < 0) return false;
    mpz_class a = x.get_num(), b = x.get_den();
    if (!mpz_perfect_square_p(a.get_mpz_t()) || !mpz_perfect_square_p(b.get_mpz_t())) return false;
    mpz_class ra, rb;
    mpz_sqrt(ra.get_mpz_t(), a.get_mpz_t());
    mpz_sqrt(rb.get_mpz_t(), b.get_mpz_t());
    *root = mpq_class(ra, rb);
    return true;
}

ProductDecomposition to_integer_decomposition(std::size_t n, const std::vector<RatTerm>& terms, const QMatrix& rest) {
    ProductDecomposition d;
    std::vector<mpq_class> coefs;
    for (const auto& t : terms) {
        mpq_class fu, fv;
        d.U.push_back(linear_form(n, t.u, &fu));
        d.V.push_back(linear_form(n, t.v, &fv));
        coefs.push_back(t.c * fu * fv);
    }
    mpz_class wscale;
    Polynomial W = quadratic_from_matrix(rest, &wscale);
    mpz_class l = wscale;
    for (const auto& c : coefs) l = lcm(l, c.get_den());
    d.scale = l;
    for (const auto& c : coefs) {
        mpq_class x = c * l;
        d.coef.push_back(x.get_num());
    }
    d.W = W * mpz_class(l / wscale);
    return d;
}

}  // namespace

ProductDecomposition decompose_quadratic(const Polynomial& form, const std::vector<bool>& is_y) {
    check_quadratic(form, "decompose_quadratic");
    std::size_t n = form.nvars();
    if (is_y.size() != n) throw InvalidInput("decompose_quadratic: mask length mismatch");
    QMatrix A = quadratic_matrix(form);
    std::vector<RatTerm> squares, products;
    while (true) {
        // Lagrange step on a y variable with nonzero diagonal entry.
        std::size_t piv = n;
        for (std::size_t i = 0; i < n && piv == n; ++i)
            if (is_y[i] && A[i][i] != 0) piv = i;
        if (piv < n) {
            QVector row = A[piv];
            mpq_class c = 1 / A[piv][piv];
            squares.push_back({c, row, row});
            subtract_product(A, c, row, row);
            continue;
        }
        // Hyperbolic step on a y-y off-diagonal entry.
        std::size_t pi = n, pj = n;
        for (std::size_t i = 0; i < n && pi == n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (is_y[i] && is_y[j] && A[i][j] != 0) {
                    pi = i;
                    pj = j;
                    break;
                }
        if (pi < n) {
            mpq_class a = A[pi][pj];
            QVector u = unit_vec(n, pi), v = unit_vec(n, pj);
            for (std::size_t k = 0; k < n; ++k) {
                if (k == pi || k == pj) continue;
                u[k] = A[pj][k] / a;
                v[k] = A[pi][k] / a;
            }
            products.push_back({2 * a, u, v});
            subtract_product(A, 2 * a, u, v);
            continue;
        }
        break;
    }
    // Only y-z entries remain: 2 y^T B z with B factored through its row echelon form.
    std::vector<std::size_t> ys, zs;
    for (std::size_t i = 0; i < n; ++i) (is_y[i] ? ys : zs).push_back(i);
    QMatrix B;
    for (std::size_t i : ys) {
        QVector row;
        for (std::size_t j : zs) row.push_back(A[i][j]);
        B.push_back(std::move(row));
    }
    if (!B.empty() && !zs.empty()) {
        Echelon e = row_reduce(B);
        for (std::size_t k = 0; k < e.rank(); ++k) {
            // B = P R with P[:,k] read off from B's pivot columns.
            QVector u(n, 0), v(n, 0);
            for (std::size_t a = 0; a < ys.size(); ++a) u[ys[a]] = B[a][e.pivots[k]];
            for (std::size_t b = 0; b < zs.size(); ++b) v[zs[b]] = e.rref[k][b];
            products.push_back({2, u, v});
            subtract_product(A, 2, u, v);
        }
    }
    // Pair squares c_i L_i^2 + c_j L_j^2 that split over Q.
    std::vector<bool> used(squares.size(), false);
    for (std::size_t i = 0; i < squares.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t j = i + 1; j < squares.size(); ++j) {
            if (used[j]) continue;
            mpq_class k;
            if (!rational_sqrt(-squares[j].c / squares[i].c, &k)) continue;
            QVector u = squares[i].u, v = squares[i].u;
            for (std::size_t t = 0; t < n; ++t) {
                u[t] -= k * squares[j].u[t];
                v[t] += k * squares[j].u[t];
            }
            products.push_back({squares[i].c, u, v});
            used[i] = used[j] = true;
            break;
        }
        if (!used[i]) products.push_back(squares[i]);
    }
    return to_integer_decomposition(n, products, A);
}

long modified_rank_lower(const Polynomial& form, const std::vector<bool>& is_y) {
    check_quadratic(form, "modified_rank_lower");
    QMatrix A = quadratic_matrix(form);
    std::size_t n = A.size();
    QMatrix yy, yall;
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_y[i]) continue;
        QVector r1, r2;
        for (std::size_t j = 0; j < n; ++j) {
            if (is_y[j]) r1.push_back(A[i][j]);
            r2.push_back(A[i][j]);
        }
        yy.push_back(std::move(r1));
        yall.push_back(std::move(r2));
    }
    long m = 2 * (long)rank(yall) - (long)rank(yy);
    return (m + 1) / 2;
}

ProductDecomposition cover_decomposition(const Polynomial& form, const std::vector<bool>& is_y) {
    std::size_t n = form.nvars();
    ProductDecomposition d;
    d.W = Polynomial(n);
    std::vector<std::pair<Monomial, mpz_class>> rest;
    for (const auto& [m, c] : form.terms()) {
        bool hy = false;
        for (std::size_t j = 0; j < n; ++j) hy |= m.exps[j] && is_y[j];
        if (hy)
            rest.emplace_back(m, c);
        else
            d.W.add_term(m, c);
    }
    while (!rest.empty()) {
        std::size_t bestv = n, bestc = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if (!is_y[v]) continue;
            std::size_t cnt = 0;
            for (const auto& [m, c] : rest) cnt += m.exps[v] > 0;
            if (cnt > bestc) { bestc = cnt; bestv = v; }
        }
        Polynomial quot(n);
        std::vector<std::pair<Monomial, mpz_class>> keep;
        for (auto& [m, c] : rest) {
            if (m.exps[bestv]) {
                Monomial q = m;
                q.exps[bestv] -= 1;
                quot.add_term(q, c);
            } else {
                keep.emplace_back(m, c);
            }
        }
        d.U.push_back(Polynomial::variable(n, bestv));
        d.V.push_back(std::move(quot));
        d.coef.push_back(1);
        rest = std::move(keep);
    }
    return d;
}

SchmidtBrackets quadratic_schmidt_rank_complex(const Polynomial& form) {
    check_quadratic(form, "quadratic_schmidt_rank_complex");
    long rk = quadratic_birch_rank(form).lower;
    SchmidtBrackets b;
    b.complex.method = RankMethod::exact_quadratic_matrix;
    b.complex.lower = b.complex.upper = (rk + 1) / 2;
    ProductDecomposition d = decompose_quadratic(form, std::vector<bool>(form.nvars(), true));
    b.rational.method = RankMethod::decomposition_witness;
    b.rational.lower = (rk + 1) / 2;
    b.rational.upper = (long)d.length();
    RankWitness w;
    w.lambda = {1};
    w.decomposition = std::move(d);
    b.rational.witness = std::move(w);
    return b;
}

RankReport birch_rank_estimate(const PolynomialSystem& sys0, const std::vector<u64>& primes, u64 box,
                               unsigned long seed) {
    if (primes.empty()) throw InvalidInput("birch_rank_estimate: empty prime list");
    for (u64 p : primes)
        if (!is_prime(p) || p >= (1ULL << 31)) throw InvalidInput("birch_rank_estimate: " + std::to_string(p) + " is not a prime below 2^31");
    RankReport rep;
    rep.method = RankMethod::finite_field_estimate;
    std::size_t r = sys0.size(), n = sys0.nvars();
    if (r == 0) {
        rep.lower = rep.upper = kInfiniteRank;
        rep.notes.push_back("empty system");
        return rep;
    }
    if (sys0.max_degree() < 2) throw InvalidInput("birch_rank_estimate: needs degree >= 2");
    PolynomialSystem sys = sys0.leading_forms();
    std::vector<Polynomial> jac;
    for (const auto& row : jacobian(sys))
        for (const auto& e : row) jac.push_back(e);
    CompiledSystem cj(PolynomialSystem(n, jac));
    std::vector<u64> x(n), vals(r * n);
    auto singular_at = [&](u64 p, const std::vector<std::vector<u64>>& cm) {
        cj.eval_mod(x.data(), p, cm, vals.data());
        std::vector<std::vector<u64>> M(r, std::vector<u64>(n));
        bool allzero = true;
        for (std::size_t k = 0; k < r; ++k)
            for (std::size_t j = 0; j < n; ++j) {
                M[k][j] = vals[k * n + j];
                allzero &= M[k][j] == 0;
            }
        if (allzero) return true;
        if (r == 1) return false;
        return rank_mod_p(M, p) < r;
    };
    long best = -1;
    std::vector<long> codims;
    for (u64 p : primes) {
        auto cm = cj.coefficients_mod(p);
        PrimeEstimate est;
        est.p = p;
        double total = std::pow((double)p, (double)n);
        if (total <= (double)box) {
            est.exhaustive = true;
            std::fill(x.begin(), x.end(), 0);
            while (true) {
                ++est.points;
                est.singular += singular_at(p, cm);
                std::size_t i = 0;
                while (i < n && ++x[i] == p) x[i++] = 0;
                if (i == n) break;
            }
            // largest e with p^e <= count
            long e = -1;
            for (mpz_class pw = 1; pw <= (unsigned long)est.singular; pw *= (unsigned long)p) ++e;
            est.codim = est.singular == 0 ? (long)n : (long)n - e;
        } else {
            std::mt19937_64 rng(seed ^ (p * 0x9E3779B97F4A7C15ULL));
            for (u64 s = 0; s < box; ++s) {
                for (auto& xi : x) xi = rng() % p;
                ++est.points;
                est.singular += singular_at(p, cm);
            }
            double lp = std::log((double)p);
            if (est.singular == 0) {
                est.codim = (long)std::floor(std::log((double)est.points) / lp + 1e-9);
            } else {
                double dim = (double)n + std::log((double)est.singular / (double)est.points) / lp;
                est.codim = (long)n - (long)std::floor(dim + 1e-9);
            }
        }
        best = std::max(best, est.codim);
        codims.push_back(est.codim);
        rep.per_prime.push_back(est);
    }
    rep.lower = best;
    rep.upper = (long)n;
    bool agree = std::all_of(codims.begin(), codims.end(), [&](long c) { return c == codims[0]; });
    if (!agree) rep.notes.push_back("primes disagree: reductions at some primes lose rank");
    rep.notes.push_back(agree && codims.size() > 1 ? "confidence: primes agree" : "confidence: single or conflicting estimate");
    return rep;
}

std::vector<std::vector<long>> lambda_lattice(std::size_t r, int H) {
    std::vector<std::vector<long>> out;
    std::vector<long> v(r, -H);
    if (r == 0) return out;
    while (true) {
        long g = 0;
        for (long x : v) g = std::gcd(g, std::labs(x));
        auto first = std::find_if(v.begin(), v.end(), [](long x) { return x != 0; });
        if (g == 1 && first != v.end() && *first > 0) out.push_back(v);
        std::size_t i = r;
        while (i > 0 && v[i - 1] == H) v[--i] = -H;
        if (i == 0) break;
        ++v[i - 1];
    }
    return out;
}

Polynomial combine(const PolynomialSystem& sys, const std::vector<long>& lambda) {
    Polynomial p(sys.nvars());
    for (std::size_t i = 0; i < sys.size(); ++i)
        if (lambda[i]) p += sys[i] * mpz_class(lambda[i]);
    return p;
}

RankReport modified_schmidt_upper(const PolynomialSystem& sys, const VariableSplit& vs, long budget,
                                  int lattice_height) {
    std::size_t n = sys.nvars(), r = sys.size();
    vs.validate(n);
    RankReport rep;
    rep.method = RankMethod::decomposition_witness;
    if (r == 0) {
        rep.lower = rep.upper = kInfiniteRank;
        rep.notes.push_back("empty system");
        return rep;
    }
    if (sys.max_degree() < 2) throw InvalidInput("modified_schmidt_upper: needs degree >= 2");
    std::vector<bool> is_y(n, true);
    for (std::size_t z : vs.z_block) is_y[z] = false;

    // A combination free of y variables has modified rank 0; detect it exactly.
    std::map<Monomial, std::size_t> ycols;
    for (const auto& p : sys.polys())
        for (const auto& [m, c] : p.terms()) {
            bool hy = false;
            for (std::size_t j = 0; j < n; ++j) hy |= m.exps[j] && is_y[j];
            if (hy) ycols.emplace(m, ycols.size());
        }
    QMatrix Yt(ycols.size(), QVector(r, 0));
    for (std::size_t k = 0; k < r; ++k)
        for (const auto& [m, c] : sys[k].terms()) {
            auto it = ycols.find(m);
            if (it != ycols.end()) Yt[it->second][k] = c;
        }
    QMatrix pure = nullspace(Yt, r);
    if (!pure.empty()) {
        RankWitness w;
        w.lambda = primitive_integer(pure[0]);
        Polynomial comb(n);
        for (std::size_t k = 0; k < r; ++k) comb += sys[k] * w.lambda[k];
        ProductDecomposition d;
        d.W = comb;
        w.decomposition = d;
        rep.lower = rep.upper = 0;
        rep.witness = std::move(w);
        return rep;
    }

    bool quadratic = true;
    for (const auto& p : sys.polys()) quadratic &= p.degree() == 2 && p.is_homogeneous();
    long best_upper = LONG_MAX, best_lower = LONG_MAX;
    RankWitness best;
    auto lattice = r == 1 ? std::vector<std::vector<long>>{{1}} : lambda_lattice(r, lattice_height);
    for (const auto& lam : lattice) {
        Polynomial q = combine(sys, lam);
        if (q.is_zero()) continue;
        bool qq = quadratic && q.degree() == 2;
        ProductDecomposition d = qq ? decompose_quadratic(q, is_y) : cover_decomposition(q, is_y);
        long lo = qq ? modified_rank_lower(q, is_y) : 1;
        best_lower = std::min(best_lower, lo);
        if ((long)d.length() < best_upper) {
            best_upper = (long)d.length();
            best.lambda = to_mpz(lam);
            best.decomposition = std::move(d);
        }
    }
    rep.lower = best_lower == LONG_MAX ? 1 : best_lower;
    if (r > 1) rep.notes.push_back("combinations searched over the height-" + std::to_string(lattice_height) + " lattice");
    if (best_upper > budget) {
        rep.upper = kInfiniteRank;
        rep.notes.push_back("no witness found with length <= " + std::to_string(budget));
        return rep;
    }
    rep.upper = best_upper;
    rep.witness = std::move(best);
    return rep;
}

}  // namespace cm
