#include "doctest.h"
#include "level_sets.hpp"
#include "support.hpp"

#include "cm/regularize.hpp"

using namespace cm;
using testing_support::P;
using testing_support::S;

namespace {

RankTargetFamily F2(long c) {
    RankTargetFamily t;
    t.F[2] = RankTarget::constant(c);
    return t;
}

bool contains(const PolynomialSystem& s, const Polynomial& p) {
    for (const auto& q : s.polys())
        if (q == p || q == -p) return true;
    return false;
}

bool linear_outputs_independent(const Regularization& reg) {
    QMatrix rows;
    std::size_t n = reg.output.nvars();
    for (const auto& p : reg.output.polys()) {
        if (p.degree() != 1) continue;
        QVector row(n, 0);
        for (const auto& [m, c] : p.terms())
            for (std::size_t j = 0; j < n; ++j)
                if (m.exps[j]) row[j] = c;
        rows.push_back(row);
    }
    return rank(rows) == rows.size();
}

}  // namespace

TEST_CASE("rank targets: parsing and monotone extension") {
    auto c = RankTarget::parse("const:4");
    CHECK(c(0) == 4);
    CHECK(c(100) == 4);
    auto a = RankTarget::parse("affine:2,3");
    CHECK(a(0) == 2);
    CHECK(a(5) == 17);
    auto t = RankTarget::parse("table:1,2,4;slope:1");
    CHECK(t(0) == 1);
    CHECK(t(2) == 4);
    CHECK(t(5) == 7);
    for (long R = 0; R < 20; ++R) CHECK(t(R) <= t(R + 1));
    CHECK_THROWS_AS(RankTarget::parse("table:3,2"), InvalidInput);
    CHECK_THROWS_AS(RankTarget::parse("const:x"), InvalidInput);
    CHECK_THROWS_AS(RankTarget::parse("log:2"), InvalidInput);
    CHECK_THROWS_AS(RankTarget::parse("4"), InvalidInput);
}

TEST_CASE("regularize: a rank-2 quadratic becomes its two linear factors") {
    auto sys = S("x1 x2", 2);
    auto reg = regularize(sys, F2(2));
    CHECK(reg.output.size() == 2);
    CHECK(reg.linear_count == 2);
    CHECK(reg.quadratic_count == 0);
    CHECK(contains(reg.output, P("x1", 2)));
    CHECK(contains(reg.output, P("x2", 2)));
    CHECK(verify_expressions(reg));
    REQUIRE(reg.expressions[0].size() == 1);
    CHECK(reg.expressions[0].begin()->first.size() == 2);  // a product of two outputs
    CHECK(reg.log.size() == 1);
}

TEST_CASE("regularize: six squares already meet F2 = 2") {
    auto sys = PolynomialSystem(6, {testing_support::sum_of_squares(6, 6)});
    auto reg = regularize(sys, F2(2));
    CHECK(reg.output == sys);
    CHECK(reg.log.empty());
    CHECK(reg.certified_h_lower == 3);
}

TEST_CASE("regularize: six squares plus x7 x8") {
    Polynomial s6 = testing_support::sum_of_squares(6, 8);
    auto sys = PolynomialSystem(8, {s6, s6 + P("x7 x8", 8)});

    // F2 = 3: the difference x7 x8 is split off, six squares stay
    auto reg3 = regularize(sys, F2(3));
    REQUIRE(reg3.log.size() >= 1);
    CHECK(reg3.log[0].lambda == std::vector<mpz_class>{1, -1});
    CHECK(reg3.log[0].pivot == 1);
    CHECK(reg3.log[0].decomposition.length() == 1);
    CHECK(reg3.output.size() == 3);
    CHECK(contains(reg3.output, s6));
    CHECK(contains(reg3.output, P("x7", 8)));
    CHECK(contains(reg3.output, P("x8", 8)));
    CHECK(verify_expressions(reg3));
    CHECK(reg3.certified_h_lower == 3);

    // F2 = 4: h(six squares) = 3 < 4, so the loop continues down to linear forms
    auto reg4 = regularize(sys, F2(4));
    CHECK(reg4.log.size() == 2);
    CHECK(reg4.quadratic_count == 0);
    CHECK(reg4.linear_count == 8);
    CHECK(verify_expressions(reg4));
    CHECK(reg4.certified_h_lower == kInfiniteRank);
}

TEST_CASE("regularize: dependent quadratics and linear forms are reselected") {
    auto sys = S("x1^2 + x2 x3; 2 * x1^2 + 2 * x2 x3; x1 + x2; 2 * x1 + 2 * x2", 3);
    auto reg = regularize(sys, F2(1));
    CHECK(reg.quadratic_count == 1);
    CHECK(reg.linear_count == 1);
    CHECK(reg.log.size() == 1);
    CHECK(reg.log[0].kind == "dependent");
    CHECK(verify_expressions(reg));
    CHECK(linear_outputs_independent(reg));
}

TEST_CASE("regularize: unsupported degree and bad members") {
    CHECK_THROWS_AS(regularize(S("x1^3", 2), F2(2)), InvalidInput);
    CHECK_THROWS_AS(regularize(S("x1^2 + x2", 2), F2(2)), InvalidInput);
}

TEST_CASE("regularize_parametric: y1 z1 + z2^2") {
    // y1 = x1, z1 = x2, z2 = x3
    VariableSplit vs{{}, {0}, {1, 2}};
    auto sys = S("x1 x2 + x3^2", 3);
    auto reg = regularize_parametric(sys, vs, F2(2));
    REQUIRE(reg.log.size() == 2);
    const auto& first = reg.log[0];
    CHECK(first.kind == "modified");
    CHECK(first.decomposition.length() == 1);
    CHECK(first.decomposition.W == P("x3^2", 3) * first.decomposition.scale);
    CHECK(first.adjoined.size() == 3);  // y1, z1 and the pure-z quadratic z2^2
    CHECK(first.pure_z_after == 1);
    CHECK(first.quadratic_after == 0);
    // the pure-z square has h = 1 < 2 and is split into z2 * z2
    CHECK(reg.log[1].kind == "product");
    CHECK(reg.linear_count == 3);
    CHECK(contains(reg.output, P("x1", 3)));
    CHECK(contains(reg.output, P("x2", 3)));
    CHECK(contains(reg.output, P("x3", 3)));
    CHECK(verify_expressions(reg));
}

TEST_CASE("regularize_parametric: already regular and pure-z systems are unchanged") {
    VariableSplit vs{{}, {0, 1}, {2, 3}};
    auto hi = S("x1 x3 + x2 x4", 4);
    auto reg = regularize_parametric(hi, vs, F2(2));
    CHECK(reg.log.empty());
    CHECK(reg.output == hi);
    CHECK(reg.certified_modified_lower >= 2);

    auto pure = S("x3^2 + x3 x4 + x4^2", 4);
    auto rp = regularize_parametric(pure, vs, F2(1));
    CHECK(rp.log.empty());
    CHECK(rp.pure_z_count == 1);
    CHECK(rp.certified_modified_lower == kInfiniteRank);
}

TEST_CASE("property: fuzzed regularizations verify, refine level sets and respect the step bound") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        auto sys = testing_support::random_regularize_input(rng);
        long F = 1 + (long)(rng() % 3);
        auto reg = regularize(sys, F2(F), 4);
        CHECK(verify_expressions(reg));
        CHECK((long)reg.log.size() <= reg.step_bound);
        CHECK(reg.certified_h_lower >= F);
        CHECK(linear_outputs_independent(reg));
        auto ls = testing_support::level_set_pairs(reg, rng, 300, 400);
        CHECK(ls.violations == 0);
    }
}

TEST_CASE("property: parametric fuzzing keeps the lexicographic measure") {
    std::mt19937_64 rng(4321);
    for (int trial = 0; trial < 15; ++trial) {
        auto sys = testing_support::random_regularize_input(rng);
        std::size_t n = sys.nvars();
        VariableSplit vs;
        for (std::size_t j = 0; j < n; ++j) (j % 2 ? vs.z_block : vs.y_block).push_back(j);
        auto reg = regularize_parametric(sys, vs, F2(2), 3);
        CHECK(verify_expressions(reg));
        CHECK((long)reg.log.size() <= reg.step_bound);
        CHECK(reg.certified_modified_lower >= 2);
        CHECK(reg.certified_h_lower >= 2);
        long prev = reg.step_bound;
        for (const auto& s : reg.log) {
            long pot = 2 * s.quadratic_after + s.pure_z_after;
            CHECK(pot < prev);
            prev = pot;
        }
    }
}

TEST_CASE("select_split: eight squares") {
    auto sys = PolynomialSystem(8, {testing_support::sum_of_squares(8, 8)});
    auto sel = select_split(sys, 2, 3);
    CHECK(sel.split.y_block == std::vector<std::size_t>{0, 1});
    CHECK(sel.rank_f1g.lower == 2);
    CHECK(sel.rank_f2.lower == 6);
    CHECK(sel.decomposition.g[0].is_zero());
    CHECK(recombine(sel.decomposition) == sys);
    CHECK(sel.threshold == 7);
}

TEST_CASE("select_split: identity-like linear system takes two 2x2 blocks") {
    std::vector<Polynomial> ps(2, Polynomial(10));
    for (std::size_t j = 0; j < 10; ++j) ps[j % 2] += Polynomial::variable(10, j);
    PolynomialSystem sys(10, ps);
    auto sel = select_split(sys, 2, 1);
    CHECK(sel.split.y_block == std::vector<std::size_t>{0, 1, 2, 3});
    REQUIRE(sel.minors.size() == 2);
    CHECK(sel.rank_f1g.lower >= 2);
    CHECK(sel.rank_f2.lower >= 1);
    // each block is a nonsingular minor of the coefficient matrix
    ZMatrix A = linear_coefficients(sys);
    for (const auto& b : sel.minors) {
        ZMatrix sub(2, std::vector<mpz_class>(2));
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t c = 0; c < 2; ++c) sub[k][c] = A[k][b[c]];
        CHECK(sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0] != 0);
    }
}

TEST_CASE("select_split: rank too small reports achieved bounds") {
    auto sys = S("x1^2 + x2^2", 2);
    try {
        select_split(sys, 2, 3);
        FAIL("expected a split error");
    } catch (const SplitError& e) {
        std::string msg = e.what();
        CHECK(msg.find("[2, 2]") != std::string::npos);
        CHECK(e.partial.threshold == 7);
    }
}

TEST_CASE("select_split: finite-field branch on a diagonal cubic") {
    auto sys = S("x1^3 + x2^3 + x3^3 + x4^3", 4);
    auto sel = select_split(sys, 1, 1, {7, 11}, 100000);
    CHECK(sel.split.y_block.size() <= 1);
    CHECK(sel.rank_f1g.lower >= 1);
    CHECK(sel.rank_f2.lower >= 1);
    CHECK(recombine(sel.decomposition) == sys);
    // Jacobian of f1 + g restricted to I has full rank somewhere
    auto mixed = PolynomialSystem(4, {sel.decomposition.f1[0] + sel.decomposition.g[0]});
    auto J = jacobian(mixed);
    bool full = false;
    std::vector<mpz_class> x{1, 2, 3, 4};
    for (auto j : sel.minors[0]) full |= J[0][j].evaluate(x) != 0;
    CHECK(full);
}

TEST_CASE("property: split selection recombines and its selected columns carry the minor") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 6 + rng() % 5;
        auto q = testing_support::random_polynomial(rng, n, 2, 3 * (int)n, 5, true);
        if (q.is_zero() || quadratic_birch_rank(q).lower < 5) continue;
        auto sys = PolynomialSystem(n, {q});
        auto sel = select_split(sys, 1, 1);
        CHECK(recombine(sel.decomposition) == sys);
        auto J = jacobian(PolynomialSystem(n, {sel.decomposition.f1[0] + sel.decomposition.g[0]}));
        for (auto j : sel.minors[0]) CHECK_FALSE(J[0][j].is_zero());
    }
}
