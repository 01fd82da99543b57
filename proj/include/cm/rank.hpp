#pragma once

#include <climits>
#include <optional>
#include <string>
#include <vector>

#include "cm/linalg.hpp"
#include "cm/poly.hpp"

namespace cm {

inline constexpr long kInfiniteRank = LONG_MAX;

enum class RankMethod { exact_linear, exact_quadratic_matrix, finite_field_estimate, decomposition_witness };
std::string to_string(RankMethod m);

// scale * form = sum_i coef_i * U_i * V_i + W over the integers; U_i linear, W free of the y variables.
struct ProductDecomposition {
    mpz_class scale = 1;
    std::vector<mpz_class> coef;
    std::vector<Polynomial> U, V;
    Polynomial W;

    std::size_t length() const { return coef.size(); }
    bool verify(const Polynomial& form) const;
};

struct RankWitness {
    std::vector<mpz_class> lambda;                       // combination of the system members
    std::optional<ProductDecomposition> decomposition;  // of that combination
    std::vector<std::size_t> columns;                    // selected columns / vanishing support
};

struct PrimeEstimate {
    u64 p = 0;
    u64 points = 0;      // points examined
    u64 singular = 0;    // points where the Jacobian drops rank
    bool exhaustive = false;
    long codim = 0;
};

struct RankReport {
    long lower = 0;
    long upper = kInfiniteRank;
    RankMethod method = RankMethod::exact_linear;
    std::optional<RankWitness> witness;
    std::vector<PrimeEstimate> per_prime;
    std::vector<std::string> notes;

    bool exact() const { return lower == upper; }
};

// Coefficient matrix of a system of linear forms (throws on any other degree).
ZMatrix linear_coefficients(const PolynomialSystem& sys);
Polynomial linear_form(std::size_t n, const std::vector<mpz_class>& coeffs);
Polynomial linear_form(std::size_t n, const QVector& coeffs, mpq_class* factor);
// Symmetric A with form = x^T A x.
QMatrix quadratic_matrix(const Polynomial& form);
Polynomial quadratic_from_matrix(const QMatrix& A, mpz_class* scale);

RankReport linear_rank(const PolynomialSystem& sys, unsigned long seed = 1);
RankReport quadratic_birch_rank(const Polynomial& form);

struct SchmidtBrackets {
    RankReport complex;   // exact h_C = ceil(rank/2)
    RankReport rational;  // h_C <= h_Q <= witness length
};
SchmidtBrackets quadratic_schmidt_rank_complex(const Polynomial& form);

RankReport birch_rank_estimate(const PolynomialSystem& sys, const std::vector<u64>& primes, u64 box,
                               unsigned long seed = 1);

// Decomposition of a quadratic form as products plus a remainder in the variables outside `is_y`.
// With every variable in `is_y` this is an ordinary Schmidt decomposition (W = 0).
ProductDecomposition decompose_quadratic(const Polynomial& form, const std::vector<bool>& is_y);
// ceil(m/2), m = minimal rank of the form's matrix over all choices of the z-z block.
long modified_rank_lower(const Polynomial& form, const std::vector<bool>& is_y);
// Any degree: greedily factor out y variables, U_i = y_v, V_i = quotient.
ProductDecomposition cover_decomposition(const Polynomial& form, const std::vector<bool>& is_y);

RankReport modified_schmidt_upper(const PolynomialSystem& sys, const VariableSplit& vs, long budget,
                                  int lattice_height = 3);

// Primitive integer vectors with entries in [-H, H], first nonzero entry positive, lexicographic order.
std::vector<std::vector<long>> lambda_lattice(std::size_t r, int H);
Polynomial combine(const PolynomialSystem& sys, const std::vector<long>& lambda);

}  // namespace cm
