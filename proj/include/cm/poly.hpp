#pragma once

#include <gmpxx.h>

#include <climits>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cm/error.hpp"
#include "cm/ntheory.hpp"

namespace cm {

inline constexpr int kZeroDegree = INT_MIN;  // degree of the zero polynomial

struct Monomial {
    std::vector<unsigned> exps;

    Monomial() = default;
    explicit Monomial(std::size_t n) : exps(n, 0) {}
    explicit Monomial(std::vector<unsigned> e) : exps(std::move(e)) {}

    std::size_t nvars() const { return exps.size(); }
    unsigned degree() const;
    bool is_constant() const { return degree() == 0; }
    Monomial operator*(const Monomial& o) const;

    // Graded lexicographic: total degree first, then lexicographic with x1 > x2 > ...
    friend bool operator<(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps == b.exps; }
};

class Polynomial {
public:
    using Terms = std::map<Monomial, mpz_class>;

    Polynomial() = default;
    explicit Polynomial(std::size_t n) : n_(n) {}

    static Polynomial constant(std::size_t n, const mpz_class& c);
    static Polynomial variable(std::size_t n, std::size_t i);

    std::size_t nvars() const { return n_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Monomial& m, const mpz_class& c);
    mpz_class coefficient(const Monomial& m) const;

    int degree() const;
    bool is_homogeneous() const;
    Polynomial homogeneous_part(int k) const;
    bool depends_on(std::size_t var) const;
    mpz_class max_abs_coefficient() const;
    mpz_class sum_abs_coefficients() const;
    mpz_class content() const;

    Polynomial derivative(std::size_t var) const;
    mpz_class evaluate(std::span<const mpz_class> x) const;

    // Rename variables: variable i becomes target[i] in an n_new-variable ring.
    Polynomial remap(std::size_t n_new, std::span<const std::size_t> target) const;
    // Set the listed variables to zero.
    Polynomial restrict_zero(std::span<const std::size_t> vars) const;

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const mpz_class& c);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const mpz_class& c) { return a *= c; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }

private:
    std::size_t n_ = 0;
    Terms terms_;
};

class PolynomialSystem {
public:
    PolynomialSystem() = default;
    PolynomialSystem(std::size_t n, std::vector<Polynomial> polys);

    std::size_t nvars() const { return n_; }
    std::size_t size() const { return polys_.size(); }
    const std::vector<Polynomial>& polys() const { return polys_; }
    const Polynomial& operator[](std::size_t i) const { return polys_[i]; }

    // degree -> indices of member polynomials of that degree.
    std::map<int, std::vector<std::size_t>> grading() const;
    int max_degree() const;
    // Sum over member polynomials of their degrees (the exponent D in N^{n-D}).
    int total_degree() const;
    bool is_homogeneous() const;
    // Highest-degree homogeneous part of each member.
    PolynomialSystem leading_forms() const;

    friend bool operator==(const PolynomialSystem& a, const PolynomialSystem& b) {
        return a.n_ == b.n_ && a.polys_ == b.polys_;
    }

private:
    std::size_t n_ = 0;
    std::vector<Polynomial> polys_;
};

std::vector<mpz_class> evaluate(const PolynomialSystem& sys, std::span<const mpz_class> x);
std::vector<mpz_class> evaluate(const PolynomialSystem& sys, std::span<const i64> x);

// Row k, column j holds d f_k / d x_j.
std::vector<std::vector<Polynomial>> jacobian(const PolynomialSystem& sys);

// Hot-loop evaluator. Machine-word paths are only taken when certified safe.
class CompiledSystem {
public:
    explicit CompiledSystem(const PolynomialSystem& sys);

    std::size_t nvars() const { return n_; }
    std::size_t size() const { return polys_.size(); }
    // True when every value at points with |x_i| <= bound fits in a signed 64-bit word.
    bool fits_i64(u64 bound) const;
    void eval_i64(const i64* x, i64* out) const;
    void eval_mpz(const i64* x, mpz_class* out) const;
    // x_i already reduced mod q; q < 2^32.
    void eval_mod(const u64* x, u64 q, const std::vector<std::vector<u64>>& coef_mod, u64* out) const;
    std::vector<std::vector<u64>> coefficients_mod(u64 q) const;

private:
    struct Term {
        mpz_class coef;
        i64 coef64 = 0;
        bool coef_fits = false;
        std::vector<std::pair<unsigned, unsigned>> factors;  // (var, exp)
    };
    std::size_t n_ = 0;
    std::vector<std::vector<Term>> polys_;
    std::vector<mpz_class> sum_abs_;
    std::vector<int> degree_;
};

// Each member written as const_k + sum_i p_{k,i}(x_i).
struct SeparableSystem {
    std::size_t n = 0, r = 0;
    // univariate[i][k][e] = coefficient of x_i^e (e >= 1) in member k.
    std::vector<std::vector<std::vector<mpz_class>>> univariate;
    std::vector<mpz_class> constants;
};
std::optional<SeparableSystem> separable_parts(const PolynomialSystem& sys);

struct VariableSplit {
    std::vector<std::size_t> k_block, y_block, z_block;  // 0-based indices
    void validate(std::size_t n) const;
};

struct SplitDecomposition {
    PolynomialSystem f1;  // terms with y variables only
    PolynomialSystem g;   // terms mixing y and z
    PolynomialSystem f2;  // remaining terms, i.e. f(0, z)
};

SplitDecomposition split(const PolynomialSystem& sys, const VariableSplit& vs);
PolynomialSystem recombine(const SplitDecomposition& d);

// y-monomial (exponents over all n variables, zero outside the y-block) ->
// coefficient of that monomial in each member, as a polynomial in the other variables.
std::map<Monomial, PolynomialSystem> coefficient_forms(const PolynomialSystem& sys, const VariableSplit& vs);

// Text format: terms "c * x1^a1 x2^a2" joined by + or -.
Polynomial parse_polynomial(const std::string& text, std::size_t n);
std::string format_polynomial(const Polynomial& p);
// One member per non-empty line or ';'-separated item.
PolynomialSystem parse_system(const std::string& text, std::size_t n);

}  // namespace cm
