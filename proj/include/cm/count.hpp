#pragma once

#include <string>
#include <vector>

#include "cm/numeric.hpp"
#include "cm/poly.hpp"
#include "cm/sieve.hpp"

namespace cm {

enum class CountMode { weighted, prime_only };
CountMode parse_count_mode(const std::string& s);
std::string to_string(CountMode m);

struct PredictionComparison {
    u64 N = 0;
    std::vector<i64> s;
    std::string method;                 // "additive-convolution" or "enumeration"
    double count_weighted = 0;          // sum over [N]^n of Lambda(x) 1[p(x) = s]
    double count_weighted_primes = 0;   // same sum restricted to prime coordinates
    double prime_power_contribution = 0;
    u64 count_prime_only = 0;           // number of prime points
    bool sanity_ok = true;              // count_prime_only (log 2)^n <= count_weighted

    // filled by compare_with_prediction
    bool has_prediction = false;
    u64 Q = 0;
    double Phi = 0;
    double singular_series = 0;        // 1 + sum_{2 <= q <= Q} B(s,q), or 0 when a local factor vanishes
    double singular_series_euler = 0;
    double singular_integral = 0;
    double singular_integral_tail = 0;
    double scale = 0;                   // N^{n - D}
    double predicted = 0;
    double relative_error = 0;          // |count_weighted - predicted| / predicted
    double heuristic_error = 0;         // 1 / log N
    std::vector<std::string> notes;
};

// Budgets: additive systems with r = 1 use the convolution path (n <= 8, N <= 1e5);
// anything else is enumerated over the Lambda-support and needs n <= 4, N <= 300.
PredictionComparison count_prime_points(const PolynomialSystem& sys, const std::vector<i64>& s, u64 N,
                                        const SieveTable* table = nullptr);

PredictionComparison compare_with_prediction(const PolynomialSystem& sys, const std::vector<i64>& s, u64 N, u64 Q,
                                             double Phi, const SieveTable* table = nullptr);

}  // namespace cm
