#pragma once

#include <string>
#include <vector>

#include "cm/numeric.hpp"
#include "cm/poly.hpp"

namespace cm {

struct QuadratureInfo {
    std::string rule;    // "separable-gl", "tensor-gl", "sobol-qmc", "exact"
    double nodes = 0;    // integrand evaluations of the finer rule
    double error = 0;    // |fine - coarse|
};

struct OscillatoryIntegral {
    std::vector<double> tau;
    cplx value;
    QuadratureInfo quadrature;
};

// I(tau) = int_{[0,1]^n} e(tau . f(x)) dx for a system of forms of one common degree.
class CubeIntegrator {
public:
    explicit CubeIntegrator(const PolynomialSystem& sys, double budget = 4e7);

    int degree() const { return d_; }
    std::size_t forms() const { return r_; }
    bool separable() const { return !blocks_.empty(); }
    // max over the cube of |f_k|, bounded by the sum of absolute coefficients
    const std::vector<double>& value_bound() const { return bound_; }

    OscillatoryIntegral operator()(const std::vector<double>& tau) const;
    // Single rule; fine = true selects the finer of the two rules.
    cplx value(const std::vector<double>& tau, bool fine) const;

private:
    struct Block {
        std::vector<std::vector<double>> coef;  // coef[k][e]: coefficient of x^e in form k
        unsigned power = 1;
    };
    struct Term {
        double coef;
        std::vector<unsigned> exps;
    };
    cplx block_integral(const Block& b, const std::vector<double>& tau, bool fine) const;
    cplx tensor_integral(const std::vector<double>& tau, bool fine) const;
    cplx qmc_integral(const std::vector<double>& tau, std::size_t points) const;
    double phase(const std::vector<double>& x, const std::vector<double>& tau) const;

    std::size_t n_, r_;
    int d_ = 0;
    double budget_;
    std::vector<Block> blocks_;
    std::vector<std::vector<Term>> terms_;
    std::vector<double> bound_, grad_bound_;
};

OscillatoryIntegral cube_integral(const PolynomialSystem& sys, const std::vector<double>& tau);

struct SingularIntegralEstimate {
    std::vector<double> mu;
    double Phi = 0;
    double value = 0;
    double imag = 0;            // zero by the symmetry I(-tau) = conj I(tau) when r = 1
    bool imag_flagged = false;
    double quadrature_error = 0;
    double tail_bound = 0;      // c * Phi^{-1/2}
    double tail_constant = 0;   // c
    double nodes = 0;           // outer nodes
};

// J(mu; Phi) = int_{|tau|_inf <= Phi} I(tau) e(-mu . tau) dtau.
SingularIntegralEstimate singular_integral(const PolynomialSystem& sys, const std::vector<double>& mu, double Phi,
                                           double budget = 4e6);

// J(mu; Phi) for each Phi in an increasing list; r = 1 reuses the inner segments.
// With stop_tail > 0 the ladder ends at the first rung whose tail bound is at most stop_tail.
std::vector<SingularIntegralEstimate> singular_integral_ladder(const PolynomialSystem& sys, const std::vector<double>& mu,
                                                               const std::vector<double>& Phis, double budget = 4e6,
                                                               double stop_tail = 0);

struct MuInfinity {
    double value = 0;
    double t = 0;          // first coordinate of mu = N^{-d} s
    std::vector<double> mu;
    double Phi_star = 0;
    double tail_bound = 0;
    bool converged = false;  // tail bound reached 1e-3 within the ladder
    std::vector<SingularIntegralEstimate> ladder;
};

// J(N^{-d} s; Phi*) with Phi* the first of 4, 8, ..., Phi_max whose tail bound is at most 1e-3.
MuInfinity mu_infinity(const PolynomialSystem& sys, const std::vector<double>& s, double N, double Phi_max = 1024);

}  // namespace cm
