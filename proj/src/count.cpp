#include "cm/count.hpp"

#include <cmath>
#include <unordered_map>

#include "cm/archimedean.hpp"
#include "cm/error.hpp"
#include "cm/local.hpp"

namespace cm {

CountMode parse_count_mode(const std::string& s) {
    if (s == "weighted") return CountMode::weighted;
    if (s == "prime-only" || s == "prime_only") return CountMode::prime_only;
    throw InvalidInput("mode must be weighted or prime-only, got '" + s + "'");
}

std::string to_string(CountMode m) { return m == CountMode::weighted ? "weighted" : "prime-only"; }

namespace {

constexpr u64 kMaxConvolutionN = 100000, kMaxEnumerationN = 300;
constexpr std::size_t kMaxConvolutionVars = 8, kMaxEnumerationVars = 4;
constexpr i64 kDenseRange = 1 << 22;

struct Weight {
    double all = 0;     // Lambda-weighted over prime powers
    double primes = 0;  // Lambda-weighted over primes
    u64 count = 0;      // prime points

    Weight& operator+=(const Weight& o) {
        all += o.all;
        primes += o.primes;
        count += o.count;
        return *this;
    }
    friend Weight operator*(const Weight& a, const Weight& b) {
        return {a.all * b.all, a.primes * b.primes, a.count * b.count};
    }
};

// Value distribution of a sum of univariate parts; dense when the value range is small.
class Distribution {
public:
    Distribution(i64 lo, i64 hi) : lo_(lo), hi_(hi), dense_(hi - lo < kDenseRange) {
        if (dense_) cells_.assign((std::size_t)(hi - lo + 1), Weight{});
    }
    void add(i64 v, const Weight& w) {
        if (dense_)
            cells_[(std::size_t)(v - lo_)] += w;
        else
            map_[v] += w;
    }
    Weight get(i64 v) const {
        if (v < lo_ || v > hi_) return {};
        if (dense_) return cells_[(std::size_t)(v - lo_)];
        auto it = map_.find(v);
        return it == map_.end() ? Weight{} : it->second;
    }
    template <class Fn>
    void each(Fn&& fn) const {
        if (dense_) {
            for (std::size_t i = 0; i < cells_.size(); ++i)
                if (cells_[i].all != 0) fn(lo_ + (i64)i, cells_[i]);
        } else {
            for (const auto& [v, w] : map_) fn(v, w);
        }
    }
    i64 lo() const { return lo_; }
    i64 hi() const { return hi_; }

private:
    i64 lo_, hi_;
    bool dense_;
    std::vector<Weight> cells_;
    std::unordered_map<i64, Weight> map_;
};

using Histogram = std::vector<std::pair<i64, Weight>>;

Histogram coordinate_histogram(const std::vector<mpz_class>& coef, const SieveTable& t, u64 N) {
    std::map<i64, Weight> h;
    for (u64 x : t.support()) {
        if (x > N) break;
        mpz_class v = 0, pw = 1;
        for (std::size_t e = 1; e < coef.size(); ++e) {
            pw *= (unsigned long)x;
            v += coef[e] * pw;
        }
        if (!v.fits_slong_p()) throw BudgetExceeded("coordinate values exceed 64 bits");
        Weight w;
        w.all = t.lambda(x);
        if (t.is_prime(x)) {
            w.primes = w.all;
            w.count = 1;
        }
        h[v.get_si()] += w;
    }
    return Histogram(h.begin(), h.end());
}

Distribution convolve(const std::vector<Histogram>& hs) {
    Distribution d(0, 0);
    d.add(0, {1.0, 1.0, 1});
    i64 cur_lo = 0, cur_hi = 0;
    for (const auto& h : hs) {
        if (h.empty()) return Distribution(0, 0);
        cur_lo += h.front().first;
        cur_hi += h.back().first;
        Distribution next(cur_lo, cur_hi);
        d.each([&](i64 v, const Weight& w) {
            for (const auto& [u, wu] : h) next.add(v + u, w * wu);
        });
        d = std::move(next);
    }
    return d;
}

void finish(PredictionComparison& pc, std::size_t n) {
    pc.prime_power_contribution = pc.count_weighted - pc.count_weighted_primes;
    pc.sanity_ok = (double)pc.count_prime_only * std::pow(std::log(2.0), (double)n) <= pc.count_weighted * (1 + 1e-12) + 1e-9;
}

}  // namespace

PredictionComparison count_prime_points(const PolynomialSystem& sys, const std::vector<i64>& s, u64 N,
                                        const SieveTable* table) {
    std::size_t n = sys.nvars(), r = sys.size();
    if (r == 0) throw InvalidInput("count: empty system");
    if (s.size() != r) throw InvalidInput("target s has " + std::to_string(s.size()) + " entries, system has " + std::to_string(r));
    if (N < 1) throw InvalidInput("count: N must be at least 1");
    PredictionComparison pc;
    pc.N = N;
    pc.s = s;
    if (N < 2) {
        pc.method = "empty";
        return pc;
    }
    auto sep = separable_parts(sys);
    bool additive = sep && r == 1;
    if (additive && (n > kMaxConvolutionVars || N > kMaxConvolutionN))
        throw BudgetExceeded("convolution path handles n <= 8 and N <= 100000");
    if (!additive && (n > kMaxEnumerationVars || N > kMaxEnumerationN))
        throw BudgetExceeded("enumeration handles n <= 4 and N <= 300 for non-additive systems");
    SieveTable own;
    if (!table || table->N() < N) {
        own = sieve(std::max<u64>(N, 2));
        table = &own;
    }
    if (additive) {
        pc.method = "additive-convolution";
        mpz_class target = mpz_class((long)s[0]) - sep->constants[0];
        if (!target.fits_slong_p()) return pc;
        std::vector<Histogram> hs;
        for (std::size_t i = 0; i < n; ++i) hs.push_back(coordinate_histogram(sep->univariate[i][0], *table, N));
        std::size_t half = n / 2;
        Distribution left = convolve(std::vector<Histogram>(hs.begin(), hs.begin() + (long)half));
        Distribution right = convolve(std::vector<Histogram>(hs.begin() + (long)half, hs.end()));
        i64 t = target.get_si();
        CompensatedSum all, primes;
        u64 count = 0;
        left.each([&](i64 v, const Weight& w) {
            Weight o = right.get(t - v);
            if (o.all == 0) return;
            Weight p = w * o;
            all.add(p.all);
            primes.add(p.primes);
            count += p.count;
        });
        pc.count_weighted = all.value();
        pc.count_weighted_primes = primes.value();
        pc.count_prime_only = count;
        finish(pc, n);
        return pc;
    }
    pc.method = "enumeration";
    std::vector<u64> pts;
    for (u64 x : table->support())
        if (x <= N) pts.push_back(x);
    CompiledSystem cs(sys);
    bool small = cs.fits_i64(N);
    std::vector<i64> x(n, (i64)pts[0]), out(r);
    std::vector<mpz_class> outz(r);
    std::vector<std::size_t> idx(n, 0);
    CompensatedSum all, primes;
    u64 count = 0;
    while (true) {
        bool hit = true;
        if (small) {
            cs.eval_i64(x.data(), out.data());
            for (std::size_t k = 0; k < r; ++k) hit &= out[k] == s[k];
        } else {
            cs.eval_mpz(x.data(), outz.data());
            for (std::size_t k = 0; k < r; ++k) hit &= outz[k] == (long)s[k];
        }
        if (hit) {
            double w = 1, wp = 1;
            bool all_prime = true;
            for (i64 v : x) {
                w *= table->lambda((u64)v);
                all_prime &= table->is_prime((u64)v);
            }
            wp = all_prime ? w : 0.0;
            all.add(w);
            primes.add(wp);
            count += all_prime;
        }
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++idx[i] < pts.size()) {
                x[i] = (i64)pts[idx[i]];
                break;
            }
            idx[i] = 0;
            x[i] = (i64)pts[0];
            if (i == 0) {
                pc.count_weighted = all.value();
                pc.count_weighted_primes = primes.value();
                pc.count_prime_only = count;
                finish(pc, n);
                return pc;
            }
        }
    }
}

PredictionComparison compare_with_prediction(const PolynomialSystem& sys, const std::vector<i64>& s, u64 N, u64 Q,
                                             double Phi, const SieveTable* table) {
    PredictionComparison pc = count_prime_points(sys, s, N, table);
    PolynomialSystem top = sys.leading_forms();
    int d = top[0].degree();
    for (const auto& p : top.polys())
        if (p.degree() != d) throw InvalidInput("prediction needs forms of one common degree");
    std::size_t n = sys.nvars(), r = sys.size();
    auto ss = singular_series(sys, s, Q);
    std::vector<double> mu;
    for (i64 v : s) mu.push_back((double)v / std::pow((double)N, d));
    auto J = singular_integral(top, mu, Phi);
    pc.has_prediction = true;
    pc.Q = Q;
    pc.Phi = Phi;
    // a vanishing local factor kills the whole product even when the truncated sum has not settled
    pc.singular_series = ss.zero_factor ? 0.0 : ss.value;
    pc.singular_series_euler = ss.euler;
    pc.singular_integral = J.value;
    pc.singular_integral_tail = J.tail_bound;
    pc.scale = std::pow((double)N, (double)n - (double)(d * (int)r));
    pc.predicted = ss.value * J.value * pc.scale;
    pc.heuristic_error = 1.0 / std::log((double)N);
    if (pc.predicted > 0)
        pc.relative_error = std::abs(pc.count_weighted - pc.predicted) / pc.predicted;
    else
        pc.relative_error = pc.count_weighted == 0 ? 0.0 : INFINITY;
    if (ss.zero_factor) pc.notes.push_back("a truncated local factor vanishes; the main term is zero");
    if (ss.flagged) pc.notes.push_back(std::to_string(ss.flagged) + " moduli had a non-negligible imaginary part");
    if (pc.prime_power_contribution > 0)
        pc.notes.push_back("prime powers contribute " + std::to_string(pc.prime_power_contribution) + " to the weighted count");
    return pc;
}

}  // namespace cm
