#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>

#include "cm/numeric.hpp"
#include "cm/poly.hpp"
#include "cm/sieve.hpp"

namespace cm {

struct ArcParams {
    u64 N = 2;
    double C = 2;
    int d = 1;
    std::size_t r = 1;

    double L() const;  // (log N)^C
    // throws InvalidInput unless N >= 2, d >= 1, r >= 1 and (log N)^C < N^d / 2
    void validate() const;
};

// M: boxes of radius N^{-d} L in every coordinate of an r-tuple.
// N: boxes of radius N^{-i} L in coordinate i (1-based) of a d-tuple.
enum class ArcFlavor { M, N };

struct ArcVerdict {
    std::vector<mpq_class> point;
    bool major = false;
    u64 q = 0;
    std::vector<u64> a;
    std::string to_string() const;  // "major(q, a)" or "minor"
};

// Smallest q <= L with |alpha_i - a_i/q| (distance on the torus) within the radius for every i and
// gcd(a, q) = 1. Distances are exact rationals; the radius is the double value of N^{-e} L.
ArcVerdict classify(const std::vector<mpq_class>& alpha, const ArcParams& params, ArcFlavor flavor);
ArcVerdict classify(const std::vector<double>& alpha, const ArcParams& params, ArcFlavor flavor);

// S_0(beta) = sum_{x <= N} Lambda(x) e(beta_d x^d + ... + beta_1 x); beta[i-1] multiplies x^i.
cplx s0_sum(const SieveTable& table, const std::vector<double>& beta, u64 N);
cplx s0_sum(const SieveTable& table, const std::vector<double>& beta);

// alpha = a/q + tau; the a/q part is reduced exactly mod q.
struct TorusPoint {
    u64 q = 1;
    std::vector<i64> a;
    std::vector<double> tau;
};

// T(alpha) = sum_{x in [N]^n} Lambda(x) e(p(x) . alpha). Separable systems use a product of one-dimensional
// sums; others enumerate the Lambda-support under `budget` evaluations.
cplx t_sum(const PolynomialSystem& sys, const SieveTable& table, u64 N, const TorusPoint& alpha, double budget = 5e7);
cplx t_sum(const PolynomialSystem& sys, const SieveTable& table, u64 N, const std::vector<double>& alpha,
           double budget = 5e7);

// The same sum grouped by residue class: sum_{g in Z_q^n} e(p(g) . a/q) sum_{x = g mod q} Lambda(x) e(p(x) . tau).
// tau = 0 works for any system (the inner sums are products of class sums of Lambda); tau != 0 needs a
// separable system.
cplx t_sum_by_residues(const PolynomialSystem& sys, const SieveTable& table, u64 N, const TorusPoint& alpha,
                       double budget = 5e7);

struct MinorScanRow {
    u64 N = 0;
    double sup_ratio = 0;   // max |S_0| / N over the minor sample points
    long samples = 0;       // points drawn
    long minor = 0;         // of which minor
    std::vector<double> argmax;
};

// For each N in the ladder, a Sobol sample of T^d filtered through classify (flavor N) and the largest
// |S_0(beta)| / N over the minor points.
std::vector<MinorScanRow> minor_sup_scan(const SieveTable& table, double C, int d, const std::vector<u64>& ladder,
                                         long samples);

// phi(q)^{-n} W_{a,q} N^n I(N^d tau), with I the cube integral of the leading forms.
// Requires q <= L and |tau_i| <= N^{-d} L for the given C.
cplx major_arc_main_term(const PolynomialSystem& sys, u64 N, double C, u64 q, const std::vector<i64>& a,
                         const std::vector<double>& tau);

}  // namespace cm
