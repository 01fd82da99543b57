#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace cm {

using u64 = std::uint64_t;
using i64 = std::int64_t;

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
bool is_prime(u64 n);

std::vector<std::pair<u64, int>> factorize(u64 n);
u64 euler_phi(u64 n);
int mobius(u64 n);
std::vector<u64> divisors(u64 n);

// Residues g in [0, q) with gcd(g, q) = 1. For q = 1 this is {0}.
std::vector<u64> unit_residues(u64 q);

inline i64 mod_floor(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace cm
