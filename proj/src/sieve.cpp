#include "cm/sieve.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "cm/error.hpp"
#include "cm/numeric.hpp"

namespace cm {

namespace {

constexpr char kMagic[8] = {'C', 'M', 'S', 'P', 'F', 'v', '1', '\0'};

void put_u64(std::ostream& out, u64 v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

bool get_u64(std::istream& in, u64& v) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= (u64)b[i] << (8 * i);
    return true;
}

}  // namespace

SieveTable::SieveTable(std::vector<u64> spf) : spf_(std::move(spf)) {
    u64 n = N();
    base_.assign(n + 1, 0);
    lambda_.assign(n + 1, 0.0);
    for (u64 x = 2; x <= n; ++x) {
        u64 p = spf_[x];
        if (p == x) primes_.push_back(x);
        u64 y = x;
        while (y % p == 0) y /= p;
        if (y == 1) {
            base_[x] = p;
            lambda_[x] = std::log((double)p);
            support_.push_back(x);
        }
    }
}

double SieveTable::psi(u64 x) const {
    CompensatedSum s;
    for (u64 m : support_) {
        if (m > x) break;
        s.add(lambda_[m]);
    }
    return s.value();
}

SieveTable sieve(u64 N) {
    if (N < 2) throw InvalidInput("sieve: N must be at least 2");
    std::vector<u64> spf(N + 1, 0);
    std::vector<u64> primes;
    for (u64 i = 2; i <= N; ++i) {
        if (spf[i] == 0) {
            spf[i] = i;
            primes.push_back(i);
        }
        for (u64 p : primes) {
            if (p > spf[i] || i * p > N) break;
            spf[i * p] = p;
        }
    }
    return SieveTable(std::move(spf));
}

void save_spf_cache(const SieveTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write sieve cache " + path);
    out.write(kMagic, 8);
    put_u64(out, t.N());
    for (u64 v : t.spf()) put_u64(out, v);
    if (!out) throw InvalidInput("short write on sieve cache " + path);
}

SieveTable load_spf_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open sieve cache " + path);
    char magic[8];
    u64 N = 0;
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw InvalidInput(path + ": bad magic");
    if (!get_u64(in, N) || N < 2) throw InvalidInput(path + ": bad header");
    std::vector<u64> spf(N + 1);
    for (u64 i = 0; i <= N; ++i)
        if (!get_u64(in, spf[i])) throw InvalidInput(path + ": truncated table");
    // spot-check: each entry is a divisor that is its own smallest factor
    for (u64 x = 2; x <= N; ++x) {
        u64 p = spf[x];
        if (p < 2 || p > x || x % p != 0 || spf[p] != p) throw InvalidInput(path + ": corrupt entry at " + std::to_string(x));
    }
    return SieveTable(std::move(spf));
}

SieveTable cached_sieve(u64 N, const std::string& dir) {
    if (dir.empty()) return sieve(N);
    std::filesystem::path p = std::filesystem::path(dir) / ("spf_" + std::to_string(N) + ".bin");
    if (std::filesystem::exists(p)) {
        try {
            SieveTable t = load_spf_cache(p.string());
            if (t.N() == N) return t;
        } catch (const InvalidInput&) {
            // fall through and rebuild
        }
    }
    SieveTable t = sieve(N);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!ec) save_spf_cache(t, p.string());
    return t;
}

}  // namespace cm
