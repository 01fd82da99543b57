#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cm/numeric.hpp"
#include "cm/poly.hpp"

namespace cm {

inline constexpr u64 kDefaultEnumerationBudget = 50'000'000;

// Residue sums of one system at one modulus. Separable systems use per-variable value histograms,
// others one histogram of values over U_q^n.
class ResidueModel {
public:
    ResidueModel(const PolynomialSystem& sys, u64 q, u64 budget = kDefaultEnumerationBudget);

    u64 modulus() const { return q_; }
    std::size_t forms() const { return r_; }
    // W_{a,q} = sum_{g in U_q^n} e(p(g) . a / q); a must be reduced mod q.
    cplx W(const std::vector<u64>& a) const;
    // phi(q)^n as a double.
    double units_power() const { return units_power_; }

private:
    struct Factor {
        std::vector<std::pair<std::vector<u64>, u64>> hist;  // value tuple mod q -> multiplicity
        unsigned power = 1;
    };
    cplx factor_sum(const Factor& f, const std::vector<u64>& a) const;

    u64 q_;
    std::size_t n_, r_;
    RootTable roots_;
    double units_power_;
    std::vector<u64> const_mod_;
    std::vector<Factor> factors_;  // product of factor sums (separable) or a single full histogram
};

struct ResidueSum {
    u64 q = 1;
    std::vector<u64> a;
    cplx value;
    double n_terms = 1;  // phi(q)^n
};

ResidueSum residue_sum(const PolynomialSystem& sys, u64 q, const std::vector<u64>& a,
                       u64 budget = kDefaultEnumerationBudget);

// Tuples a in [0, q)^r with gcd(a_1, ..., a_r, q) = 1; for q = 1 the single tuple 0.
std::vector<std::vector<u64>> primitive_tuples(u64 q, std::size_t r);

struct BValue {
    double value = 0;
    double imag = 0;
    bool imag_flagged = false;  // |imag| above 1e-9
};

// B(s,q) = phi(q)^{-n} sum_{a primitive mod q} W_{a,q} e(-s.a/q).
BValue b_coefficient(const PolynomialSystem& sys, const std::vector<i64>& s, u64 q,
                     u64 budget = kDefaultEnumerationBudget);
BValue b_coefficient(const ResidueModel& model, const std::vector<i64>& s);

struct LocalTerm {
    int t = 0;
    mpz_class count;       // M(p^t): unit solutions mod p^t
    mpq_class normalized;  // (p^t)^r M(p^t) / phi(p^t)^n
};

struct LocalFactorEstimate {
    u64 p = 0;
    std::vector<LocalTerm> terms;
    bool stabilized = false;
    int t_star = 0;  // first t with normalized(t) = normalized(t + 1)
    bool partial = false;
    std::string note;
};

// Number of g in U_q^n with p(g) = s mod q.
mpz_class unit_solution_count(const PolynomialSystem& sys, const std::vector<i64>& s, u64 q,
                              u64 budget = kDefaultEnumerationBudget);

LocalFactorEstimate local_factor(const PolynomialSystem& sys, const std::vector<i64>& s, u64 p, int t_max,
                                 u64 budget = kDefaultEnumerationBudget);

struct SingularSeriesEstimate {
    std::vector<i64> s;
    u64 Q = 1;
    double value = 1;                // 1 + sum_{2 <= q <= Q} B(s,q)
    double euler = 1;                // prod_{p <= Q} (1 + sum_{p^t <= Q} B(s,p^t))
    std::map<u64, double> per_q;     // q -> B(s,q)
    std::map<u64, double> factors;   // p -> 1 + sum_t B(s,p^t)
    bool zero_factor = false;        // some truncated local factor vanishes
    long flagged = 0;                // moduli whose B had a non-negligible imaginary part
};

SingularSeriesEstimate singular_series(const PolynomialSystem& sys, const std::vector<i64>& s, u64 Q,
                                       u64 budget = kDefaultEnumerationBudget);

enum class SolubilityKind { nonsingular_solution_found, no_solution_mod, inconclusive };
std::string to_string(SolubilityKind k);

struct SolubilityVerdict {
    SolubilityKind kind = SolubilityKind::inconclusive;
    int t = 0;                        // exponent where the verdict was reached
    std::vector<u64> witness;         // unit solution mod p^t
    int minor_valuation = 0;          // valuation k of the best r x r Jacobian minor at the witness
    std::vector<std::size_t> minor_columns;
    int lifts_verified = 0;           // successful Hensel steps t -> t+1 (three attempted)
};

SolubilityVerdict local_solubility(const PolynomialSystem& sys, const std::vector<i64>& s, u64 p, int t_cap,
                                   u64 budget = kDefaultEnumerationBudget);

}  // namespace cm
