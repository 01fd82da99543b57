#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "cm/archimedean.hpp"
#include "cm/error.hpp"

using namespace cm;
using testing_support::S;

namespace {

const double kPi = 3.14159265358979323846;

std::complex<double> e(double x) { return std::polar(1.0, 2 * kPi * x); }

// Composite Simpson on [0, 1] with many points.
template <class Fn>
std::complex<double> simpson(Fn f, int m = 200000) {
    double h = 1.0 / m;
    std::complex<double> acc = f(0.0) + f(1.0);
    for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * (h / 3);
}

// Density of x1 + x2 + x3 on the unit cube (piecewise quadratic).
double ternary_density(double t) {
    if (t <= 0 || t >= 3) return 0;
    if (t < 1) return t * t / 2;
    if (t < 2) return (-2 * t * t + 6 * t - 3) / 2;
    return (3 - t) * (3 - t) / 2;
}

}  // namespace

TEST_CASE("cube integral at tau = 0 is exactly one") {
    for (auto sys : {S("x1 + x2 + x3", 3), S("x1*x2 + x3^2", 3), S("x1^2 - x2^2; x1*x2", 2)}) {
        auto v = cube_integral(sys, std::vector<double>(sys.size(), 0.0));
        CHECK(v.value == std::complex<double>(1.0, 0.0));
        CHECK(v.quadrature.rule == "exact");
    }
}

TEST_CASE("ternary linear cube integral has the closed form") {
    auto sys = S("x1 + x2 + x3", 3);
    for (double tau : {0.1, 0.5, 1.0, 2.7, 13.3, -40.2}) {
        auto ref = std::pow((e(tau) - 1.0) / std::complex<double>(0, 2 * kPi * tau), 3);
        auto v = cube_integral(sys, {tau});
        CHECK(std::abs(v.value - ref) < 1e-8);
        CHECK(std::abs(v.value) <= 1.0 + 1e-12);
    }
}

TEST_CASE("quadratic cube integrals against one-dimensional oracles") {
    auto sq = S("x1^2", 1);
    for (double tau : {1.0, 5.5, 30.0}) {
        auto ref = simpson([&](double x) { return e(tau * x * x); });
        auto v = cube_integral(sq, {tau});
        CHECK(std::abs(v.value - ref) < 1e-9);
        CHECK(v.quadrature.error < 1e-8);
    }
    // non-separable: int int e(tau x y) = int_0^1 (e(tau y) - 1) / (2 pi i tau y) dy
    auto xy = S("x1*x2", 2);
    for (double tau : {0.7, 4.0, 19.0}) {
        auto ref = simpson([&](double y) {
            double a = tau * y;
            if (a == 0) return std::complex<double>(1.0, 0.0);
            return (e(a) - 1.0) / std::complex<double>(0, 2 * kPi * a);
        });
        auto v = cube_integral(xy, {tau});
        CHECK(v.quadrature.rule == "tensor-gl");
        CHECK(std::abs(v.value - ref) < 1e-9);
    }
    // two forms, mixed: check against the product structure x1^2 and x2^2 combined
    auto two = S("x1^2 + 2*x2^2; x1^2 - x2^2", 2);
    std::vector<double> tau = {1.3, -0.4};
    auto ref = simpson([&](double x) { return e((tau[0] + tau[1]) * x * x); }) *
               simpson([&](double x) { return e((2 * tau[0] - tau[1]) * x * x); });
    CHECK(std::abs(cube_integral(two, tau).value - ref) < 1e-9);
}

TEST_CASE("quasi Monte Carlo path for five or more variables") {
    auto sys = S("x1*x2 + x3*x4 + x5^2", 5);
    double tau = 1.0;
    auto J = simpson([&](double y) {
        double a = tau * y;
        if (a == 0) return std::complex<double>(1.0, 0.0);
        return (e(a) - 1.0) / std::complex<double>(0, 2 * kPi * a);
    });
    auto F = simpson([&](double x) { return e(tau * x * x); });
    auto v = cube_integral(sys, {tau});
    CHECK(v.quadrature.rule == "sobol-qmc");
    CHECK(std::abs(v.value - J * J * F) < 1e-4);
    CHECK(v.quadrature.error < 1e-3);
}

TEST_CASE("cube integral rejects non-homogeneous or mixed-degree input") {
    CHECK_THROWS_AS(cube_integral(S("x1^2 + x2", 2), {1.0}), InvalidInput);
    CHECK_THROWS_AS(cube_integral(S("x1^2; x2", 2), {1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(cube_integral(S("x1 + x2", 2), {1.0, 2.0}), InvalidInput);
    CHECK_THROWS_AS(singular_integral(S("x1", 1), {0.5}, 0.0), InvalidInput);
}

TEST_CASE("ternary linear singular integral matches the simplex-slice density") {
    auto sys = S("x1 + x2 + x3", 3);
    for (double mu : {0.5, 1.5, 2.2}) {
        auto J = singular_integral(sys, {mu}, 64);
        CHECK(J.value == doctest::Approx(ternary_density(mu)).epsilon(1e-4));
    }
    CHECK(ternary_density(0.5) == 0.125);
    CHECK(ternary_density(1.5) == 0.75);
    auto far = singular_integral(sys, {4.0}, 64);
    CHECK(std::abs(far.value) <= far.tail_bound);
    auto m = mu_infinity(sys, {1500}, 1000);
    CHECK(m.converged);
    CHECK(m.tail_bound <= 1e-3);
    CHECK(m.value == doctest::Approx(0.75).epsilon(1e-3));
}

TEST_CASE("mu_infinity agrees with lattice counts") {
    auto tern = S("x1 + x2 + x3", 3);
    double lat = oracles::lattice_density({1, 1, 1}, 1, 1000, 1.5, 0.0);
    CHECK(mu_infinity(tern, {1500}, 1000).value == doctest::Approx(lat).epsilon(0.02));

    auto sq3 = S("x1^2 + x2^2 + x3^2", 3);
    double t = 1.0;
    double lat3 = oracles::lattice_density({1, 1, 1}, 2, 300, t, 0.01);
    auto m3 = mu_infinity(sq3, {t * 300 * 300}, 300, 256);
    CHECK(m3.value == doctest::Approx(lat3).epsilon(0.02));
    CHECK(m3.value == doctest::Approx(kPi / 4).epsilon(0.01));

    auto sq7 = S("x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 + x7^2", 7);
    double lat7 = oracles::lattice_density({1, 1, 1, 1, 1, 1, 1}, 2, 200, 3.5, 0.01);
    auto m7 = mu_infinity(sq7, {3.5 * 200 * 200}, 200);
    CHECK(m7.value > 0);
    CHECK(m7.value == doctest::Approx(lat7).epsilon(0.02));
    CHECK(mu_infinity(sq7, {8.0 * 200 * 200}, 200).value == doctest::Approx(0.0).epsilon(1e-3).scale(1.0));
}

TEST_CASE("doubling differences decay and J stays bounded") {
    std::vector<double> Phis;
    for (double P = 4; P <= 256; P *= 2) Phis.push_back(P);
    for (auto [sys, mu] : {std::pair{S("x1 + x2 + x3", 3), 0.5}, std::pair{S("x1^2 + x2^2 + x3^2", 3), 1.0}}) {
        auto L = singular_integral_ladder(sys, {mu}, Phis);
        std::vector<double> lx, ly;
        for (std::size_t i = 1; i < L.size(); ++i) {
            lx.push_back(std::log(L[i - 1].Phi));
            ly.push_back(std::log(std::abs(L[i].value - L[i - 1].value)));
            CHECK(std::abs(L[i].value - L[i - 1].value) <= L[i - 1].tail_bound + L[i].quadrature_error);
        }
        CHECK(ls_slope(lx, ly) <= -0.4);
    }
    auto sys = S("x1 + 2*x2", 2);
    double bound = 0;
    for (double mu = -0.5; mu <= 3.5; mu += 0.25) bound = std::max(bound, std::abs(singular_integral(sys, {mu}, 32).value));
    double bound2 = 0;
    for (double mu = -0.5; mu <= 3.5; mu += 0.25) bound2 = std::max(bound2, std::abs(singular_integral(sys, {mu}, 64).value));
    CHECK(bound <= 0.6);  // the density of x1 + 2 x2 peaks at 1/2
    CHECK(bound2 == doctest::Approx(bound).epsilon(0.05));
}

TEST_CASE("two-form singular integral over a box") {
    auto sys = S("x1 + x2 + x3; x1 - x2", 3);
    auto J = singular_integral(sys, {1.2, 0.1}, 8, 1e7);
    // x1 = (1.3 - x3)/2 and x2 = (1.1 - x3)/2 stay in [0,1] for every x3 in [0,1]; Jacobian 1/2
    CHECK(J.value == doctest::Approx(0.5).epsilon(0.01));
    CHECK_FALSE(J.imag_flagged);
    CHECK_THROWS_AS(singular_integral(sys, {1.2, 0.1}, 64, 1e4), BudgetExceeded);
}
