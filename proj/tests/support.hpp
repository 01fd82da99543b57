#pragma once

#include <cmath>
#include <random>

#include "cm/poly.hpp"

namespace testing_support {

inline cm::Polynomial P(const std::string& s, std::size_t n) { return cm::parse_polynomial(s, n); }

inline cm::PolynomialSystem S(const std::string& s, std::size_t n) { return cm::parse_system(s, n); }

inline cm::Polynomial random_polynomial(std::mt19937_64& rng, std::size_t n, int degree, int terms, int cmax,
                                        bool homogeneous) {
    cm::Polynomial p(n);
    std::uniform_int_distribution<int> coef(-cmax, cmax);
    std::uniform_int_distribution<std::size_t> var(0, n - 1);
    std::uniform_int_distribution<int> deg(0, degree);
    for (int t = 0; t < terms; ++t) {
        cm::Monomial m(n);
        int d = homogeneous ? degree : deg(rng);
        for (int k = 0; k < d; ++k) m.exps[var(rng)] += 1;
        p.add_term(m, coef(rng));
    }
    return p;
}

inline cm::PolynomialSystem random_system(std::mt19937_64& rng, std::size_t n, std::size_t r, int degree, int terms,
                                          int cmax, bool homogeneous) {
    std::vector<cm::Polynomial> ps;
    for (std::size_t k = 0; k < r; ++k) ps.push_back(random_polynomial(rng, n, degree, terms, cmax, homogeneous));
    return cm::PolynomialSystem(n, ps);
}

// Sum of squares x1^2 + ... + xk^2 in n variables.
inline cm::Polynomial sum_of_squares(std::size_t k, std::size_t n) {
    cm::Polynomial p(n);
    for (std::size_t i = 0; i < k; ++i) {
        cm::Monomial m(n);
        m.exps[i] = 2;
        p.add_term(m, 1);
    }
    return p;
}

}  // namespace testing_support

namespace testing_support {

// p(M x): variable i is replaced by sum_j M[i][j] x_j.
inline cm::Polynomial substitute_linear(const cm::Polynomial& p, const std::vector<std::vector<long>>& M) {
    std::size_t n = p.nvars();
    std::vector<cm::Polynomial> images;
    for (std::size_t i = 0; i < n; ++i) {
        cm::Polynomial li(n);
        for (std::size_t j = 0; j < n; ++j)
            if (M[i][j]) li += cm::Polynomial::variable(n, j) * mpz_class(M[i][j]);
        images.push_back(li);
    }
    cm::Polynomial out(n);
    for (const auto& [m, c] : p.terms()) {
        cm::Polynomial t = cm::Polynomial::constant(n, c);
        for (std::size_t i = 0; i < n; ++i)
            for (unsigned e = 0; e < m.exps[i]; ++e) t = t * images[i];
        out += t;
    }
    return out;
}

// Product of random elementary integer matrices; determinant +-1.
inline std::vector<std::vector<long>> random_unimodular(std::mt19937_64& rng, std::size_t n, int steps) {
    std::vector<std::vector<long>> M(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i) M[i][i] = 1;
    for (int s = 0; s < steps; ++s) {
        std::size_t a = rng() % n, b = rng() % n;
        if (a == b) continue;
        long k = (long)(rng() % 5) - 2;
        for (std::size_t j = 0; j < n; ++j) M[a][j] += k * M[b][j];
    }
    return M;
}

}  // namespace testing_support

namespace testing_support {

inline cm::Polynomial random_linear(std::mt19937_64& rng, std::size_t n, int cmax) {
    cm::Polynomial L(n);
    for (std::size_t j = 0; j < n; ++j) {
        long c = (long)(rng() % (2 * cmax + 1)) - cmax;
        if (c && rng() % 3) L += cm::Polynomial::variable(n, j) * mpz_class(c);
    }
    if (L.is_zero()) L = cm::Polynomial::variable(n, rng() % n);
    return L;
}

// Quadratic + linear systems with n <= 10 and at most 3 quadratics, biased toward low rank so that
// regularization has work to do.
inline cm::PolynomialSystem random_regularize_input(std::mt19937_64& rng) {
    std::size_t n = 2 + rng() % 9;
    std::size_t r2 = 1 + rng() % 3, r1 = rng() % 3;
    std::vector<cm::Polynomial> ps;
    for (std::size_t k = 0; k < r2; ++k) {
        cm::Polynomial q(n);
        int style = (int)(rng() % 3);
        if (style == 0) {
            q = random_polynomial(rng, n, 2, 2 + (int)(rng() % 8), 4, true);
        } else {
            std::size_t terms = 1 + rng() % 3;
            for (std::size_t t = 0; t < terms; ++t) q += random_linear(rng, n, 2) * random_linear(rng, n, 2);
        }
        if (style == 2 && !ps.empty()) q += ps[rng() % ps.size()] * mpz_class((long)(rng() % 3) + 1);
        ps.push_back(q);
    }
    for (std::size_t k = 0; k < r1; ++k) ps.push_back(random_linear(rng, n, 3));
    return cm::PolynomialSystem(n, ps);
}

// sum_i c_i L_i^2 with k random integer linear forms; rank <= k.
inline cm::Polynomial low_rank_quadratic(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    cm::Polynomial q(n);
    for (std::size_t i = 0; i < k; ++i) {
        cm::Polynomial L(n);
        for (std::size_t j = 0; j < n; ++j) {
            long c = (long)(rng() % 7) - 3;
            if (c) L += cm::Polynomial::variable(n, j) * mpz_class(c);
        }
        long c = (long)(rng() % 5) - 2;
        if (c == 0) c = 1;
        q += L * L * mpz_class(c);
    }
    return q;
}

}  // namespace testing_support
