#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cm/ntheory.hpp"

namespace cm {

class SieveTable {
public:
    SieveTable() = default;
    // Builds from a smallest-prime-factor table spf[0..N] (spf[0] = spf[1] = 0).
    explicit SieveTable(std::vector<u64> spf);

    u64 N() const { return spf_.empty() ? 0 : spf_.size() - 1; }
    const std::vector<u64>& spf() const { return spf_; }
    const std::vector<u64>& primes() const { return primes_; }
    // Points x <= N with Lambda(x) > 0, increasing.
    const std::vector<u64>& support() const { return support_; }

    bool is_prime(u64 x) const { return x >= 2 && x <= N() && spf_[x] == x; }
    // Prime p with x = p^k, or 0.
    u64 prime_base(u64 x) const { return x <= N() ? base_[x] : 0; }
    double lambda(u64 x) const { return x <= N() ? lambda_[x] : 0.0; }
    const std::vector<double>& lambda_table() const { return lambda_; }

    // Chebyshev psi(x) = sum_{m <= x} Lambda(m), compensated.
    double psi(u64 x) const;

private:
    std::vector<u64> spf_;
    std::vector<u64> base_;
    std::vector<double> lambda_;
    std::vector<u64> primes_;
    std::vector<u64> support_;
};

// Linear sieve up to N (N >= 2).
SieveTable sieve(u64 N);

// Cache file: 16-byte header (8-byte magic, N as little-endian u64) followed by spf[0..N] as
// little-endian u64. Lambda is recomputed on load.
void save_spf_cache(const SieveTable& t, const std::string& path);
SieveTable load_spf_cache(const std::string& path);
// Load dir/spf_<N>.bin if present and valid, otherwise sieve and write it. Empty dir disables caching.
SieveTable cached_sieve(u64 N, const std::string& dir);

}  // namespace cm
