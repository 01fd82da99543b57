#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace cm {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Neumaier variant of Kahan summation.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct CompensatedComplexSum {
    CompensatedSum re, im;
    void add(cplx z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

double pairwise_sum(std::span<const double> xs);
cplx pairwise_sum(std::span<const cplx> xs);

// e(x) = exp(2 pi i x), with the integer part of x removed before the trig call.
cplx unit_phase(double x);

// e(k/q) for k in [0, q).
class RootTable {
public:
    explicit RootTable(std::uint64_t q);
    std::uint64_t modulus() const { return q_; }
    const cplx& operator[](std::uint64_t k) const { return roots_[k]; }

private:
    std::uint64_t q_;
    std::vector<cplx> roots_;
};

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int m);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> xs);

}  // namespace cm
