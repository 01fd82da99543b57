#pragma once

// Pairs of integer points with equal output values, used to check that the level sets of a
// regularized system refine those of its input.

#include <map>
#include <random>
#include <vector>

#include "cm/linalg.hpp"
#include "cm/regularize.hpp"

namespace testing_support {

struct LevelSetResult {
    long pairs = 0;          // pairs (x, x') with x != x' and g(x) = g(x')
    long bucket_pairs = 0;   // of which found by bucketing random small points
    long violations = 0;     // pairs with f(x) != f(x')
};

inline std::vector<mpz_class> eval_all(const cm::PolynomialSystem& s, const std::vector<mpz_class>& x) {
    return cm::evaluate(s, std::span<const mpz_class>(x));
}

// Up to `target` pairs: collisions among `samples` points of [-box, box]^n, then (x, -x) pairs with x in
// the common kernel of the output linear forms.
inline LevelSetResult level_set_pairs(const cm::Regularization& reg, std::mt19937_64& rng, long target,
                                      long samples = 4000, long box = 1) {
    LevelSetResult res;
    const auto& g = reg.output;
    const auto& f = reg.input;
    std::size_t n = f.nvars();
    std::map<std::vector<mpz_class>, std::vector<std::vector<mpz_class>>> buckets;
    auto check = [&](const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
        ++res.pairs;
        if (eval_all(f, a) != eval_all(f, b)) ++res.violations;
    };
    for (long s = 0; s < samples && res.pairs < target; ++s) {
        std::vector<mpz_class> x(n);
        for (auto& v : x) v = (long)(rng() % (2 * box + 1)) - box;
        auto& bucket = buckets[eval_all(g, x)];
        bool dup = false;
        for (const auto& y : bucket) dup |= y == x;
        if (dup) continue;
        for (const auto& y : bucket) {
            if (res.pairs >= target) break;
            check(x, y);
            ++res.bucket_pairs;
        }
        if (bucket.size() < 8) bucket.push_back(x);
    }
    cm::QMatrix rows;
    for (const auto& p : g.polys()) {
        if (p.degree() != 1) continue;
        cm::QVector row(n, 0);
        for (const auto& [m, c] : p.terms())
            for (std::size_t j = 0; j < n; ++j)
                if (m.exps[j]) row[j] = c;
        rows.push_back(row);
    }
    cm::QMatrix kernel = rows.empty() ? cm::QMatrix() : cm::nullspace(rows, n);
    if (rows.empty())
        for (std::size_t j = 0; j < n; ++j) {
            cm::QVector e(n, 0);
            e[j] = 1;
            kernel.push_back(e);
        }
    std::vector<std::vector<mpz_class>> basis;
    for (const auto& v : kernel) basis.push_back(cm::primitive_integer(v));
    if (basis.empty()) return res;
    while (res.pairs < target) {
        std::vector<mpz_class> x(n, 0), y(n);
        bool nonzero = false;
        for (const auto& b : basis) {
            long c = (long)(rng() % 7) - 3;
            nonzero |= c != 0;
            for (std::size_t j = 0; j < n; ++j) x[j] += c * b[j];
        }
        if (!nonzero) continue;
        for (std::size_t j = 0; j < n; ++j) y[j] = -x[j];
        if (eval_all(g, x) != eval_all(g, y)) continue;  // only linear outputs can differ; they vanish here
        check(x, y);
    }
    return res;
}

}  // namespace testing_support
