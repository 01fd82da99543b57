#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "cm/rank.hpp"

using namespace cm;
using testing_support::P;
using testing_support::S;

namespace {

mpz_class eval_decomposition(const ProductDecomposition& d, const std::vector<mpz_class>& x) {
    mpz_class v = d.W.evaluate(x);
    for (std::size_t i = 0; i < d.length(); ++i) v += d.coef[i] * d.U[i].evaluate(x) * d.V[i].evaluate(x);
    return v;
}

void check_witness_pointwise(const ProductDecomposition& d, const Polynomial& f, std::mt19937_64& rng) {
    std::size_t n = f.nvars();
    for (int t = 0; t < 100; ++t) {
        std::vector<mpz_class> x(n);
        for (auto& v : x) v = (long)(rng() % 2001) - 1000;
        CHECK(eval_decomposition(d, x) == d.scale * f.evaluate(x));
    }
}

PolynomialSystem vandermonde_diagonal(std::size_t n, std::size_t r) {
    std::vector<Polynomial> ps;
    for (std::size_t k = 0; k < r; ++k) {
        Polynomial f(n);
        for (std::size_t i = 0; i < n; ++i) {
            Monomial m(n);
            m.exps[i] = 2;
            mpz_class a = 1;
            for (std::size_t e = 0; e < k; ++e) a *= (unsigned long)(i + 1);
            f.add_term(m, a);
        }
        ps.push_back(f);
    }
    return PolynomialSystem(n, ps);
}

}  // namespace

TEST_CASE("linear_rank: documented examples") {
    auto a = linear_rank(S("x1 + x2 + x3", 3));
    CHECK(a.lower == 3);
    CHECK(a.upper == 3);
    CHECK(a.method == RankMethod::exact_linear);

    auto b = linear_rank(S("x1 + x3; x2 + x3", 3));
    CHECK(b.lower == 2);
    CHECK(b.exact());
    CHECK(oracles::linear_rank_fp({{1, 0, 1}, {0, 1, 1}}, 101) == 2);

    auto c = linear_rank(S("x1; x2", 2));
    CHECK(c.lower == 1);
    CHECK(c.upper == 1);
}

TEST_CASE("linear_rank: empty system, dependence, wrong degree") {
    auto e = linear_rank(PolynomialSystem(4, {}));
    CHECK(e.lower == kInfiniteRank);
    CHECK(e.upper == kInfiniteRank);

    auto dep = linear_rank(S("x1 + x2; 2 * x1 + 2 * x2", 3));
    CHECK(dep.lower == 0);
    REQUIRE(dep.witness.has_value());
    CHECK(dep.witness->lambda.size() == 2);

    CHECK_THROWS_AS(linear_rank(S("x1^2 + x2", 2)), InvalidInput);
    CHECK_THROWS_AS(linear_rank(S("x1 + 1", 2)), InvalidInput);
}

TEST_CASE("linear_rank: witness support equals the reported rank") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 3 + rng() % 6, r = 1 + rng() % 3;
        auto sys = testing_support::random_system(rng, n, r, 1, 4, 3, true);
        bool nonzero = true;
        for (const auto& f : sys.polys()) nonzero &= !f.is_zero();
        if (!nonzero) continue;
        auto rep = linear_rank(sys);
        REQUIRE(rep.witness.has_value());
        Polynomial comb(n);
        for (std::size_t k = 0; k < r; ++k) comb += sys[k] * rep.witness->lambda[k];
        CHECK((long)comb.size() == rep.lower);
    }
}

TEST_CASE("linear_rank agrees with brute force over F_101 and F_997") {
    std::mt19937_64 rng(2024);
    int compared = 0;
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 2 + rng() % 7, r = 1 + rng() % 3;
        std::vector<std::vector<long>> A(r, std::vector<long>(n));
        std::vector<Polynomial> ps;
        for (auto& row : A) {
            Polynomial f(n);
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = (rng() % 3 == 0) ? 0 : (long)(rng() % 9) - 4;
                if (row[j]) f += Polynomial::variable(n, j) * mpz_class(row[j]);
            }
            ps.push_back(f);
        }
        std::uint64_t p = trial % 2 ? 997 : 101;
        auto rep = linear_rank(PolynomialSystem(n, ps));
        CHECK(rep.lower == oracles::linear_rank_fp(A, p));
        ++compared;
    }
    CHECK(compared == 30);
}

TEST_CASE("linear_rank: annealed path only certifies an upper bound") {
    // 60 columns, r = 6: too many flats and subsets for exact search
    std::size_t n = 60, r = 6;
    std::vector<Polynomial> ps(r, Polynomial(n));
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t j = 0; j < n; ++j)
            ps[k] += Polynomial::variable(n, j) * mpz_class((long)((j * (k + 3) + k * k) % 11) + 1);
    auto rep = linear_rank(PolynomialSystem(n, ps), 7);
    CHECK(rep.method == RankMethod::decomposition_witness);
    CHECK(rep.lower <= rep.upper);
    REQUIRE(rep.witness.has_value());
    Polynomial comb(n);
    for (std::size_t k = 0; k < r; ++k) comb += ps[k] * rep.witness->lambda[k];
    CHECK((long)comb.size() == rep.upper);
    CHECK(rep.upper <= (long)(n - (r - 1)));
}

TEST_CASE("quadratic_birch_rank: documented examples") {
    CHECK(quadratic_birch_rank(P("x1^2 + x2^2 + x3^2", 3)).lower == 3);
    auto h = quadratic_birch_rank(P("x1 x2", 2));
    CHECK(h.lower == 2);
    CHECK(oracles::minor_rank(oracles::doubled_matrix(P("x1 x2", 2))) == 2);
    auto one = quadratic_birch_rank(P("x1^2", 5));
    CHECK(one.lower == 1);
    CHECK(one.exact());
    CHECK(one.method == RankMethod::exact_quadratic_matrix);
    CHECK_THROWS_AS(quadratic_birch_rank(P("x1^3", 2)), InvalidInput);
    CHECK_THROWS_AS(quadratic_birch_rank(P("x1^2 + x2", 2)), InvalidInput);
}

TEST_CASE("quadratic_birch_rank equals the nonvanishing-minor rank") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + rng() % 5;
        auto f = testing_support::low_rank_quadratic(rng, n, 1 + rng() % n);
        if (f.is_zero()) continue;
        CHECK(quadratic_birch_rank(f).lower == oracles::minor_rank(oracles::doubled_matrix(f)));
    }
}

TEST_CASE("Schmidt brackets: documented examples") {
    auto three = quadratic_schmidt_rank_complex(P("x1^2 + x2^2 + x3^2", 3));
    CHECK(three.complex.lower == 2);
    CHECK(three.complex.exact());

    auto hyp = quadratic_schmidt_rank_complex(P("x1 x2", 2));
    CHECK(hyp.complex.lower == 1);
    CHECK(hyp.rational.lower == 1);
    CHECK(hyp.rational.upper == 1);
    REQUIRE(hyp.rational.witness.has_value());
    const auto& d = *hyp.rational.witness->decomposition;
    REQUIRE(d.length() == 1);
    CHECK(d.verify(P("x1 x2", 2)));
    auto uv = d.U[0] * d.V[0];
    CHECK((uv == P("x1 x2", 2) || uv == P("-x1 x2", 2)));

    auto two = quadratic_schmidt_rank_complex(P("x1^2 + x2^2", 2));
    CHECK(two.complex.lower == 1);
    CHECK(two.rational.lower == 1);
    CHECK(two.rational.upper == 2);
}

TEST_CASE("x1^2 + x2^2 is not one rational product (coefficientwise search)") {
    // (a x1 + b x2)(c x1 + d x2) = k (x1^2 + x2^2): ac = k, bd = k, ad + bc = 0
    int found = 0;
    for (int a = -8; a <= 8; ++a)
        for (int b = -8; b <= 8; ++b)
            for (int c = -8; c <= 8; ++c)
                for (int d = -8; d <= 8; ++d) {
                    int k = a * c;
                    if (k != 0 && b * d == k && a * d + b * c == 0) ++found;
                }
    CHECK(found == 0);
}

TEST_CASE("property: brackets hold and witnesses re-verify") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + rng() % 6;
        Polynomial f = trial % 2 ? testing_support::low_rank_quadratic(rng, n, 1 + rng() % n)
                                 : testing_support::random_polynomial(rng, n, 2, 6, 5, true);
        if (f.is_zero()) continue;
        auto b = quadratic_schmidt_rank_complex(f);
        CHECK(b.complex.lower <= b.rational.lower);
        CHECK(b.rational.lower <= b.rational.upper);
        CHECK(b.rational.upper <= quadratic_birch_rank(f).lower);
        const auto& d = *b.rational.witness->decomposition;
        CHECK(d.verify(f));
        CHECK(d.W.is_zero());
        check_witness_pointwise(d, f, rng);
    }
}

TEST_CASE("birch_rank_estimate matches the exact quadratic rank") {
    std::mt19937_64 rng(5150);
    const std::vector<u64> primes{7, 11, 13};
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t n = 2 + rng() % 4;
        auto f = testing_support::low_rank_quadratic(rng, n, 1 + rng() % n);
        if (f.is_zero()) continue;
        auto est = birch_rank_estimate(PolynomialSystem(n, {f}), primes, 3000000);
        CHECK(est.method == RankMethod::finite_field_estimate);
        CHECK(est.lower == quadratic_birch_rank(f).lower);
        CHECK(est.upper == (long)n);
        CHECK(est.per_prime.size() == 3);
    }
}

TEST_CASE("birch_rank_estimate: Vandermonde-weighted diagonal systems have codimension n - r + 1") {
    for (auto [n, r, p] : std::vector<std::tuple<std::size_t, std::size_t, u64>>{{5, 2, 7}, {5, 3, 11}, {3, 2, 101}, {4, 3, 13}}) {
        auto sys = vandermonde_diagonal(n, r);
        auto est = birch_rank_estimate(sys, {p}, 2000000);
        CHECK(est.per_prime[0].exhaustive);
        CHECK(est.lower == (long)(n - r + 1));
    }
}

TEST_CASE("birch_rank_estimate: empty system, empty prime list, disagreement flag") {
    auto e = birch_rank_estimate(PolynomialSystem(3, {}), {7}, 1000);
    CHECK(e.lower == kInfiniteRank);
    CHECK_THROWS_AS(birch_rank_estimate(S("x1^2", 2), {}, 1000), InvalidInput);
    CHECK_THROWS_AS(birch_rank_estimate(S("x1^2", 2), {8}, 1000), InvalidInput);

    // x1^2 + 5 x2^2 loses rank at 5 only
    auto bad = birch_rank_estimate(S("x1^2 + 5 * x2^2", 2), {5, 7}, 100000);
    CHECK(bad.per_prime[0].codim == 1);
    CHECK(bad.per_prime[1].codim == 2);
    CHECK(bad.lower == 2);
    bool flagged = false;
    for (const auto& s : bad.notes) flagged |= s.find("disagree") != std::string::npos;
    CHECK(flagged);
}

TEST_CASE("modified rank: documented examples") {
    // y1 = x1, z1 = x2, z2 = x3
    VariableSplit vs{{}, {0}, {1, 2}};
    auto f = S("x1 x2 + x3^2", 3);
    auto rep = modified_schmidt_upper(f, vs, 4);
    CHECK(rep.upper <= 1);
    CHECK(rep.lower <= rep.upper);
    REQUIRE(rep.witness.has_value());
    const auto& d = *rep.witness->decomposition;
    CHECK(d.verify(f[0]));
    REQUIRE(d.length() == 1);
    CHECK(d.W == P("x3^2", 3) * d.scale);
    CHECK((d.U[0] * d.V[0] * d.coef[0]) == P("x1 x2", 3) * d.scale);

    auto pure = modified_schmidt_upper(S("x2^2 - x2 x3", 3), vs, 4);
    CHECK(pure.lower == 0);
    CHECK(pure.upper == 0);

    // combination of two members is pure z
    auto combo = modified_schmidt_upper(S("x1 x2 + x3^2; x1 x2 - x2^2", 3), vs, 4);
    CHECK(combo.upper == 0);
    REQUIRE(combo.witness.has_value());
    Polynomial c = f[0] * combo.witness->lambda[0] + S("x1 x2 - x2^2", 3)[0] * combo.witness->lambda[1];
    CHECK_FALSE(c.depends_on(0));

    auto empty = modified_schmidt_upper(PolynomialSystem(3, {}), vs, 4);
    CHECK(empty.upper == kInfiniteRank);
}

TEST_CASE("modified rank: budget too small reports no witness") {
    VariableSplit vs{{}, {0, 1, 2}, {3}};
    auto rep = modified_schmidt_upper(S("x1^2 + x2^2 + x3^2 + x1 x4", 4), vs, 1);
    CHECK(rep.upper == kInfiniteRank);
    CHECK_FALSE(rep.witness.has_value());
    CHECK(rep.lower >= 2);
}

TEST_CASE("modified rank: cubic witnesses by covering") {
    VariableSplit vs{{}, {0, 1}, {2, 3}};
    auto f = S("x1 x3^2 + x2 x3 x4 + x4^3", 4);
    auto rep = modified_schmidt_upper(f, vs, 5);
    CHECK(rep.upper == 2);
    CHECK(rep.witness->decomposition->verify(f[0]));
}

TEST_CASE("doubling the y block keeps the modified-rank brackets") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 25; ++trial) {
        // g in (y1, y2, z1, z2); doubled system in (y1, y2, y1', y2', z1, z2)
        auto g = testing_support::random_polynomial(rng, 4, 2, 5, 4, true);
        if (g.is_zero()) continue;
        VariableSplit vs{{}, {0, 1}, {2, 3}};
        auto single = modified_schmidt_upper(PolynomialSystem(4, {g}), vs, 10);

        std::vector<std::size_t> to_a{0, 1, 4, 5}, to_b{2, 3, 4, 5};
        PolynomialSystem doubled(6, {g.remap(6, to_a), g.remap(6, to_b)});
        VariableSplit vs2{{}, {0, 1, 2, 3}, {4, 5}};
        auto dbl = modified_schmidt_upper(doubled, vs2, 10);
        CHECK(single.lower == dbl.lower);
        CHECK(single.upper == dbl.upper);
    }
}

TEST_CASE("property: one variable set to zero drops a quadratic rank by at most r + 1") {
    // The sharper bound r fails: x1 x2 has rank 2 and restricting x2 = 0 leaves rank 0.
    Polynomial h = P("x1 x2", 2);
    std::vector<std::size_t> v2{1};
    CHECK(quadratic_birch_rank(h).lower == 2);
    CHECK(h.restrict_zero(v2).is_zero());

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 2 + rng() % 6;
        auto f = testing_support::random_polynomial(rng, n, 2, 8, 4, true);
        if (f.is_zero()) continue;
        long before = quadratic_birch_rank(f).lower;
        std::vector<std::size_t> v{rng() % n};
        auto g = f.restrict_zero(v);
        long after = g.is_zero() ? 0 : quadratic_birch_rank(g).lower;
        CHECK(before - after <= 2);
        CHECK(before - after >= 0);
    }
}

TEST_CASE("property: one variable set to zero drops linear rank by at most 1") {
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 2 + rng() % 6, r = 1 + rng() % 3;
        auto sys = testing_support::random_system(rng, n, r, 1, 4, 3, true);
        std::vector<std::size_t> v{rng() % n};
        std::vector<Polynomial> restricted;
        for (const auto& f : sys.polys()) restricted.push_back(f.restrict_zero(v));
        long before = linear_rank(sys).lower;
        long after = linear_rank(PolynomialSystem(n, restricted)).lower;
        CHECK(before - after <= 1);
        CHECK(before - after >= 0);
    }
}

TEST_CASE("property: quadratic ranks are invariant under unimodular substitution") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + rng() % 5;
        auto f = testing_support::low_rank_quadratic(rng, n, 1 + rng() % n);
        if (f.is_zero()) continue;
        auto M = testing_support::random_unimodular(rng, n, 8);
        auto g = testing_support::substitute_linear(f, M);
        CHECK(quadratic_birch_rank(f).lower == quadratic_birch_rank(g).lower);
        auto bf = quadratic_schmidt_rank_complex(f), bg = quadratic_schmidt_rank_complex(g);
        CHECK(bf.complex.lower == bg.complex.lower);
    }
}

TEST_CASE("lambda lattice is primitive and sign-normalized") {
    auto L = lambda_lattice(2, 2);
    // primitive pairs in [-2,2]^2 up to sign: (0,1), (1,-2), (1,-1), (1,0), (1,1), (1,2), (2,-1), (2,1)
    CHECK(L.size() == 8);
    CHECK(lambda_lattice(0, 3).empty());
    CHECK(to_string(RankMethod::finite_field_estimate) == "finite-field-estimate");
}
