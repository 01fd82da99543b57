#include "doctest.h"
#include "support.hpp"

#include <cmath>
#include <random>

#include "cm/arcs.hpp"
#include "cm/error.hpp"
#include "cm/sieve.hpp"

using namespace cm;
using testing_support::S;

namespace {

const SieveTable& table() {
    static SieveTable t = sieve(20000);
    return t;
}

cplx e_ld(long double x) {
    long double f = x - std::floor(x);
    return std::polar(1.0, (double)(2 * 3.14159265358979323846264338327950288L * f));
}

// brute S_0 with the phase reduced exactly in rationals
cplx s0_brute(const std::vector<double>& beta, u64 N) {
    cplx acc = 0;
    for (u64 x = 2; x <= N; ++x) {
        double w = table().lambda(x);
        if (w == 0) continue;
        mpq_class ph = 0;
        mpz_class xe = 1;
        for (double b : beta) {
            xe *= (unsigned long)x;
            ph += mpq_class(b) * xe;
        }
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), ph.get_num_mpz_t(), ph.get_den_mpz_t());
        mpq_class fr = ph - fl;
        acc += w * e_ld(fr.get_d());
    }
    return acc;
}

// distance from t to the nearest integer
long double dist_z(long double t) { return std::abs(t - std::round(t)); }

}  // namespace

TEST_CASE("classification examples") {
    ArcParams p{1000, 2, 2, 1};
    auto v = classify(std::vector<mpq_class>{mpq_class(1, 3)}, p, ArcFlavor::M);
    CHECK(v.major);
    CHECK(v.q == 3);
    CHECK(v.a == std::vector<u64>{1});
    CHECK(v.to_string() == "major(3, [1])");
    auto z = classify(std::vector<mpq_class>{mpq_class(0)}, p, ArcFlavor::M);
    CHECK(z.q == 1);
    CHECK(classify(std::vector<mpq_class>{mpq_class(2, 4)}, p, ArcFlavor::M).q == 2);
    // twice the radius off 1/2
    double off = 0.5 + 2 * p.L() / 1e6;
    CHECK_FALSE(classify(std::vector<double>{off}, p, ArcFlavor::M).major);
    CHECK(classify(std::vector<double>{0.5 + 0.5 * p.L() / 1e6}, p, ArcFlavor::M).major);
    // near 1 wraps to a = 0, q = 1
    auto w = classify(std::vector<double>{1 - 1e-9}, p, ArcFlavor::M);
    CHECK(w.major);
    CHECK(w.q == 1);
    CHECK(w.a == std::vector<u64>{0});
    // golden ratio: the best q <= L misses by far more than N^{-3} L
    ArcParams g{1u << 14, 2, 3, 1};
    CHECK_FALSE(classify(std::vector<double>{(std::sqrt(5.0) - 1) / 2}, g, ArcFlavor::M).major);
    CHECK(classify(std::vector<double>{(std::sqrt(5.0) - 1) / 2}, ArcParams{1u << 14, 2, 1, 1}, ArcFlavor::M).major);
}

TEST_CASE("classification input checks") {
    CHECK_THROWS_AS(ArcParams({10, 5, 1, 1}).validate(), InvalidInput);
    CHECK_THROWS_AS(classify(std::vector<double>{0.1, 0.2}, ArcParams{1000, 2, 2, 1}, ArcFlavor::M), InvalidInput);
    CHECK_THROWS_AS(classify(std::vector<double>{0.1}, ArcParams{1000, 2, 2, 1}, ArcFlavor::N), InvalidInput);
    CHECK_THROWS_AS(classify(std::vector<double>{1.2}, ArcParams{1000, 2, 2, 1}, ArcFlavor::M), InvalidInput);
    CHECK_THROWS_AS(classify(std::vector<double>{-0.1}, ArcParams{1000, 2, 2, 1}, ArcFlavor::M), InvalidInput);
}

TEST_CASE("classification agrees with a direct scan on random points") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0, 1);
    for (int d = 1; d <= 3; ++d) {
        ArcParams p{4096, 1.5, d, 1};
        double L = p.L();
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<double> beta((std::size_t)d);
            for (auto& b : beta) b = U(rng);
            // half the points are pulled towards a rational with small denominator
            if (trial % 2) {
                u64 q = 1 + rng() % 8;
                for (std::size_t i = 0; i < beta.size(); ++i) {
                    double a = std::floor(beta[i] * q);
                    beta[i] = std::min(0.999999, (a + 0.3 * U(rng) * L * std::pow(4096.0, -(double)(i + 1)) * q) / q);
                }
            }
            auto v = classify(beta, p, ArcFlavor::N);
            u64 expect = 0;
            for (u64 q = 1; q <= (u64)std::floor(L) && !expect; ++q) {
                bool ok = true;
                u64 g = q;
                for (std::size_t i = 0; i < beta.size() && ok; ++i) {
                    long double t = (long double)beta[i] * q;
                    ok = dist_z(t) / q <= L * std::pow(4096.0, -(double)(i + 1));
                    g = std::gcd(g, (u64)std::llround(t) % q);
                }
                if (ok && g == 1) expect = q;
            }
            CHECK(v.major == (expect != 0));
            if (v.major) CHECK(v.q == expect);
        }
    }
}

TEST_CASE("exponential sum over Lambda") {
    CHECK(std::abs(s0_sum(table(), {0.0}, 10000) - table().psi(10000)) < 1e-8);
    cplx par = s0_sum(table(), {0.5}, 10);
    double expect = 3 * std::log(2.0) - 2 * std::log(3.0) - std::log(5.0) - std::log(7.0);
    CHECK(par.real() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(par.imag()) < 1e-12);
    CHECK(std::abs(s0_sum(table(), {0.3}, 1)) == 0.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> beta{U(rng), U(rng), U(rng)};
        cplx a = s0_sum(table(), beta, 2000), b = s0_brute(beta, 2000);
        CHECK(std::abs(a - b) < 1e-7);
    }
    CHECK_THROWS_AS(s0_sum(table(), {0.1}, 30000), InvalidInput);
}

TEST_CASE("T sums against direct enumeration") {
    auto sq = S("x1^2 + x2^2", 2);
    double psi = table().psi(50);
    CHECK(std::abs(t_sum(sq, table(), 50, std::vector<double>{0.0}) - psi * psi) < 1e-9);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0, 1);
    for (int trial = 0; trial < 10; ++trial) {
        double a = U(rng);
        cplx direct = 0;
        for (u64 x = 2; x <= 50; ++x)
            for (u64 y = 2; y <= 50; ++y) {
                double w = table().lambda(x) * table().lambda(y);
                if (w > 0) direct += w * e_ld((long double)a * (x * x + y * y));
            }
        CHECK(std::abs(t_sum(sq, table(), 50, std::vector<double>{a}) - direct) < 1e-9);
    }
    auto mixed = S("x1*x2 + x3; x1 - x3", 3);
    TorusPoint pt{7, {3, -2}, {1e-3, 2e-4}};
    cplx direct = 0;
    for (u64 x = 2; x <= 30; ++x)
        for (u64 y = 2; y <= 30; ++y)
            for (u64 z = 2; z <= 30; ++z) {
                double w = table().lambda(x) * table().lambda(y) * table().lambda(z);
                if (w == 0) continue;
                long double f1 = (long double)(x * y + z), f2 = (long double)x - (long double)z;
                direct += w * e_ld(f1 * (3.0L / 7 + 1e-3L) + f2 * (-2.0L / 7 + 2e-4L));
            }
    CHECK(std::abs(t_sum(mixed, table(), 30, pt) - direct) < 1e-8);
    CHECK_THROWS_AS(t_sum(mixed, table(), 300, pt, 1000), BudgetExceeded);
    CHECK_THROWS_AS(t_sum(mixed, table(), 30, TorusPoint{0, {0, 0}, {0, 0}}), InvalidInput);
    CHECK_THROWS_AS(t_sum(mixed, table(), 30, TorusPoint{1, {0}, {0}}), InvalidInput);
}

TEST_CASE("residue-class grouping reproduces T") {
    auto sep = S("x1^2 + 2*x2^3 + x3", 3);
    auto mixed = S("x1*x2 + x3^2", 3);
    for (u64 q : {1ULL, 2ULL, 5ULL, 12ULL}) {
        for (i64 a = 0; a < (i64)q; ++a) {
            TorusPoint p0{q, {a}, {0.0}};
            cplx A = t_sum(mixed, table(), 40, p0), B = t_sum_by_residues(mixed, table(), 40, p0);
            CHECK(std::abs(A - B) <= 1e-9 * std::max(1.0, std::abs(A)));
            TorusPoint p1{q, {a}, {3.7e-5}};
            cplx C = t_sum(sep, table(), 200, p1), D = t_sum_by_residues(sep, table(), 200, p1);
            CHECK(std::abs(C - D) <= 1e-9 * std::max(1.0, std::abs(C)));
        }
    }
    CHECK_THROWS_AS(t_sum_by_residues(mixed, table(), 40, TorusPoint{3, {1}, {1e-4}}), InvalidInput);
}

TEST_CASE("major arc main term tracks T near rationals") {
    auto tern = S("x1 + x2 + x3", 3);
    const u64 N = 10000;
    double N3 = 1e12;
    // q = 1 at a few tau inside the box
    for (double t : {0.0, 3.0 / N, -7.0 / N}) {
        cplx T = t_sum(tern, table(), N, std::vector<double>{t});
        cplx M = major_arc_main_term(tern, N, 2, 1, {0}, {t});
        CHECK(std::abs(T - M) < 0.02 * N3);
    }
    // q = 2, a = 1: one -1 per coordinate from the odd primes
    cplx T2 = t_sum(tern, table(), N, TorusPoint{2, {1}, {0.0}});
    cplx M2 = major_arc_main_term(tern, N, 2, 2, {1}, {0.0});
    CHECK(M2.real() == doctest::Approx(-N3).epsilon(1e-12));
    CHECK(std::abs(T2 - M2) < 0.05 * N3);
    // q = 3: mu(3)^3 / phi(3)^3
    cplx T3 = t_sum(tern, table(), N, TorusPoint{3, {1}, {0.5 / N}});
    cplx M3 = major_arc_main_term(tern, N, 2, 3, {1}, {0.5 / N});
    CHECK(std::abs(T3 - M3) < 0.01 * N3);  // error is measured against N^n
    CHECK_THROWS_AS(major_arc_main_term(tern, N, 2, 100, {1}, {0.0}), InvalidInput);
    CHECK_THROWS_AS(major_arc_main_term(tern, N, 2, 1, {0}, {0.5}), InvalidInput);
    CHECK_THROWS_AS(major_arc_main_term(tern, 10, 5, 1, {0}, {0.0}), InvalidInput);
}

TEST_CASE("minor arc sup scan") {
    auto rows = minor_sup_scan(table(), 1.0, 2, {1024, 4096}, 200);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.samples == 200);
        CHECK(row.minor > 0);
        CHECK(row.minor <= row.samples);
        CHECK(row.sup_ratio < 1.0);
        REQUIRE(row.argmax.size() == 2);
        CHECK_FALSE(classify(row.argmax, ArcParams{row.N, 1.0, 2, 1}, ArcFlavor::N).major);
        CHECK(std::abs(s0_brute(row.argmax, row.N)) / row.N == doctest::Approx(row.sup_ratio).epsilon(1e-9));
    }
    CHECK(minor_sup_scan(table(), 1.0, 2, {1024}, 0).empty());
    CHECK_THROWS_AS(minor_sup_scan(table(), 1.0, 2, {40000}, 10), InvalidInput);
}
