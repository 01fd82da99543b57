#include "cm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace cm {

namespace {

template <class T>
T pairwise(std::span<const T> xs) {
    if (xs.size() <= 16) {
        T s{};
        for (const T& x : xs) s += x;
        return s;
    }
    std::size_t h = xs.size() / 2;
    return pairwise(xs.subspan(0, h)) + pairwise(xs.subspan(h));
}

}  // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise(xs); }
cplx pairwise_sum(std::span<const cplx> xs) { return pairwise(xs); }

cplx unit_phase(double x) {
    double f = x - std::floor(x);
    double a = two_pi * f;
    return {std::cos(a), std::sin(a)};
}

RootTable::RootTable(std::uint64_t q) : q_(q), roots_(q) {
    if (q == 0) throw std::invalid_argument("RootTable: modulus must be positive");
    // Fold k into the first octant so every entry comes from a small-angle sincos.
    for (std::uint64_t k = 0; k < q; ++k) {
        std::uint64_t k2 = 2 * k <= q ? k : q - k;  // e(-k/q) = conj e(k/q)
        long double ang = 2.0L * 3.14159265358979323846264338327950288L * (long double)k2 / (long double)q;
        cplx z{(double)std::cos(ang), (double)std::sin(ang)};
        if (k2 * 4 == q) z = {0.0, 1.0};
        if (k2 * 2 == q) z = {-1.0, 0.0};
        roots_[k] = (k2 == k) ? z : std::conj(z);
    }
}

const GaussRule& gauss_legendre(int m) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    if (m < 1) throw std::invalid_argument("gauss_legendre: m must be positive");
    GaussRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        long double x = std::cos(3.14159265358979323846L * (i + 0.75L) / (m + 0.5L));
        long double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1, p1 = x;
            for (int k = 2; k <= m; ++k) {
                long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (m == 1) { p1 = x; p0 = 1; }
            dp = m * (x * p1 - p0) / (x * x - 1);
            long double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-19L) break;
        }
        long double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = (double)-x;
        rule.nodes[m - 1 - i] = (double)x;
        rule.weights[i] = rule.weights[m - 1 - i] = (double)w;
    }
    if (m == 1) { rule.nodes[0] = 0.0; rule.weights[0] = 2.0; }
    return cache.emplace(m, std::move(rule)).first->second;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ls_slope: need >= 2 paired points");
    double n = (double)x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of empty set");
    std::sort(xs.begin(), xs.end());
    std::size_t h = xs.size() / 2;
    return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

}  // namespace cm
