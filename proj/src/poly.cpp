#include "cm/poly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

namespace cm {

unsigned Monomial::degree() const { return std::accumulate(exps.begin(), exps.end(), 0u); }

Monomial Monomial::operator*(const Monomial& o) const {
    if (o.exps.size() != exps.size()) throw InvalidInput("monomial product: variable count mismatch");
    Monomial m(exps);
    for (std::size_t i = 0; i < exps.size(); ++i) m.exps[i] += o.exps[i];
    return m;
}

bool operator<(const Monomial& a, const Monomial& b) {
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exps < b.exps;
}

Polynomial Polynomial::constant(std::size_t n, const mpz_class& c) {
    Polynomial p(n);
    p.add_term(Monomial(n), c);
    return p;
}

Polynomial Polynomial::variable(std::size_t n, std::size_t i) {
    if (i >= n) throw InvalidInput("variable index out of range");
    Polynomial p(n);
    Monomial m(n);
    m.exps[i] = 1;
    p.add_term(m, 1);
    return p;
}

void Polynomial::add_term(const Monomial& m, const mpz_class& c) {
    if (m.nvars() != n_) throw InvalidInput("term has " + std::to_string(m.nvars()) + " exponents, polynomial has " + std::to_string(n_) + " variables");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

mpz_class Polynomial::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? mpz_class(0) : it->second;
}

int Polynomial::degree() const {
    if (terms_.empty()) return kZeroDegree;
    return (int)terms_.rbegin()->first.degree();
}

bool Polynomial::is_homogeneous() const {
    if (terms_.empty()) return true;
    return terms_.begin()->first.degree() == terms_.rbegin()->first.degree();
}

Polynomial Polynomial::homogeneous_part(int k) const {
    Polynomial p(n_);
    for (const auto& [m, c] : terms_)
        if ((int)m.degree() == k) p.terms_.emplace_hint(p.terms_.end(), m, c);
    return p;
}

bool Polynomial::depends_on(std::size_t var) const {
    for (const auto& [m, c] : terms_)
        if (m.exps[var]) return true;
    return false;
}

mpz_class Polynomial::max_abs_coefficient() const {
    mpz_class r = 0;
    for (const auto& [m, c] : terms_) r = std::max<mpz_class>(r, abs(c));
    return r;
}

mpz_class Polynomial::sum_abs_coefficients() const {
    mpz_class r = 0;
    for (const auto& [m, c] : terms_) r += abs(c);
    return r;
}

mpz_class Polynomial::content() const {
    mpz_class g = 0;
    for (const auto& [m, c] : terms_) g = gcd(g, c);
    return g;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    if (var >= n_) throw InvalidInput("derivative: variable index out of range");
    Polynomial d(n_);
    for (const auto& [m, c] : terms_) {
        if (!m.exps[var]) continue;
        Monomial m2 = m;
        m2.exps[var] -= 1;
        d.add_term(m2, c * m.exps[var]);
    }
    return d;
}

mpz_class Polynomial::evaluate(std::span<const mpz_class> x) const {
    if (x.size() != n_) throw InvalidInput("evaluate: point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(n_));
    mpz_class total = 0, t, pw;
    for (const auto& [m, c] : terms_) {
        t = c;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!m.exps[i]) continue;
            mpz_pow_ui(pw.get_mpz_t(), x[i].get_mpz_t(), m.exps[i]);
            t *= pw;
        }
        total += t;
    }
    return total;
}

Polynomial Polynomial::remap(std::size_t n_new, std::span<const std::size_t> target) const {
    if (target.size() != n_) throw InvalidInput("remap: target map has wrong length");
    Polynomial p(n_new);
    for (const auto& [m, c] : terms_) {
        Monomial m2(n_new);
        for (std::size_t i = 0; i < n_; ++i) {
            if (!m.exps[i]) continue;
            if (target[i] >= n_new) throw InvalidInput("remap: target index out of range");
            m2.exps[target[i]] += m.exps[i];
        }
        p.add_term(m2, c);
    }
    return p;
}

Polynomial Polynomial::restrict_zero(std::span<const std::size_t> vars) const {
    Polynomial p(n_);
    for (const auto& [m, c] : terms_) {
        bool keep = true;
        for (std::size_t v : vars)
            if (m.exps.at(v)) { keep = false; break; }
        if (keep) p.terms_.emplace_hint(p.terms_.end(), m, c);
    }
    return p;
}

Polynomial Polynomial::operator-() const {
    Polynomial p = *this;
    for (auto& [m, c] : p.terms_) c = -c;
    return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.n_ != n_) throw InvalidInput("polynomial sum: variable count mismatch");
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (o.n_ != n_) throw InvalidInput("polynomial difference: variable count mismatch");
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const mpz_class& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.n_ != b.n_) throw InvalidInput("polynomial product: variable count mismatch");
    Polynomial p(a.n_);
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) p.add_term(ma * mb, ca * cb);
    return p;
}

PolynomialSystem::PolynomialSystem(std::size_t n, std::vector<Polynomial> polys) : n_(n), polys_(std::move(polys)) {
    for (std::size_t i = 0; i < polys_.size(); ++i)
        if (polys_[i].nvars() != n_)
            throw InvalidInput("system member " + std::to_string(i) + " has " + std::to_string(polys_[i].nvars()) + " variables, expected " + std::to_string(n_));
}

std::map<int, std::vector<std::size_t>> PolynomialSystem::grading() const {
    std::map<int, std::vector<std::size_t>> g;
    for (std::size_t i = 0; i < polys_.size(); ++i) g[polys_[i].degree()].push_back(i);
    return g;
}

int PolynomialSystem::max_degree() const {
    int d = kZeroDegree;
    for (const auto& p : polys_) d = std::max(d, p.degree());
    return d;
}

int PolynomialSystem::total_degree() const {
    int D = 0;
    for (const auto& p : polys_)
        if (!p.is_zero()) D += p.degree();
    return D;
}

bool PolynomialSystem::is_homogeneous() const {
    return std::all_of(polys_.begin(), polys_.end(), [](const Polynomial& p) { return p.is_homogeneous(); });
}

PolynomialSystem PolynomialSystem::leading_forms() const {
    std::vector<Polynomial> out;
    for (const auto& p : polys_) out.push_back(p.is_zero() ? p : p.homogeneous_part(p.degree()));
    return PolynomialSystem(n_, std::move(out));
}

std::vector<mpz_class> evaluate(const PolynomialSystem& sys, std::span<const mpz_class> x) {
    if (x.size() != sys.nvars())
        throw InvalidInput("evaluate: point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(sys.nvars()));
    std::vector<mpz_class> out;
    out.reserve(sys.size());
    for (const auto& p : sys.polys()) out.push_back(p.evaluate(x));
    return out;
}

std::vector<mpz_class> evaluate(const PolynomialSystem& sys, std::span<const i64> x) {
    if (x.size() != sys.nvars())
        throw InvalidInput("evaluate: point has " + std::to_string(x.size()) + " coordinates, expected " + std::to_string(sys.nvars()));
    CompiledSystem cs(sys);
    u64 bound = 0;
    for (i64 v : x) bound = std::max<u64>(bound, v < 0 ? (u64)(-(v + 1)) + 1 : (u64)v);
    std::vector<mpz_class> out(sys.size());
    if (cs.fits_i64(bound)) {
        std::vector<i64> tmp(sys.size());
        cs.eval_i64(x.data(), tmp.data());
        for (std::size_t k = 0; k < tmp.size(); ++k) out[k] = (long)tmp[k];
    } else {
        cs.eval_mpz(x.data(), out.data());
    }
    return out;
}

std::vector<std::vector<Polynomial>> jacobian(const PolynomialSystem& sys) {
    std::vector<std::vector<Polynomial>> J(sys.size());
    for (std::size_t k = 0; k < sys.size(); ++k)
        for (std::size_t j = 0; j < sys.nvars(); ++j) J[k].push_back(sys[k].derivative(j));
    return J;
}

CompiledSystem::CompiledSystem(const PolynomialSystem& sys) : n_(sys.nvars()) {
    for (const auto& p : sys.polys()) {
        std::vector<Term> ts;
        for (const auto& [m, c] : p.terms()) {
            Term t;
            t.coef = c;
            t.coef_fits = c.fits_slong_p();
            if (t.coef_fits) t.coef64 = c.get_si();
            for (std::size_t i = 0; i < n_; ++i)
                if (m.exps[i]) t.factors.emplace_back((unsigned)i, m.exps[i]);
            ts.push_back(std::move(t));
        }
        polys_.push_back(std::move(ts));
        sum_abs_.push_back(p.sum_abs_coefficients());
        degree_.push_back(std::max(p.degree(), 0));
    }
}

bool CompiledSystem::fits_i64(u64 bound) const {
    mpz_class b = (unsigned long)bound, pw;
    mpz_class limit = 1;
    limit <<= 62;
    for (std::size_t k = 0; k < polys_.size(); ++k) {
        mpz_pow_ui(pw.get_mpz_t(), b.get_mpz_t(), degree_[k]);
        if (pw < 1) pw = 1;
        if (sum_abs_[k] * pw >= limit) return false;
        for (const auto& t : polys_[k])
            if (!t.coef_fits) return false;
    }
    return true;
}

void CompiledSystem::eval_i64(const i64* x, i64* out) const {
    for (std::size_t k = 0; k < polys_.size(); ++k) {
        i64 acc = 0;
        for (const auto& t : polys_[k]) {
            i64 v = t.coef64;
            for (auto [var, e] : t.factors)
                for (unsigned j = 0; j < e; ++j) v *= x[var];
            acc += v;
        }
        out[k] = acc;
    }
}

void CompiledSystem::eval_mpz(const i64* x, mpz_class* out) const {
    mpz_class v;
    for (std::size_t k = 0; k < polys_.size(); ++k) {
        out[k] = 0;
        for (const auto& t : polys_[k]) {
            v = t.coef;
            for (auto [var, e] : t.factors)
                for (unsigned j = 0; j < e; ++j) v *= (long)x[var];
            out[k] += v;
        }
    }
}

std::vector<std::vector<u64>> CompiledSystem::coefficients_mod(u64 q) const {
    std::vector<std::vector<u64>> cm(polys_.size());
    mpz_class r, qq = (unsigned long)q;
    for (std::size_t k = 0; k < polys_.size(); ++k)
        for (const auto& t : polys_[k]) {
            mpz_fdiv_r(r.get_mpz_t(), t.coef.get_mpz_t(), qq.get_mpz_t());
            cm[k].push_back(r.get_ui());
        }
    return cm;
}

void CompiledSystem::eval_mod(const u64* x, u64 q, const std::vector<std::vector<u64>>& coef_mod, u64* out) const {
    for (std::size_t k = 0; k < polys_.size(); ++k) {
        u64 acc = 0;
        const auto& ts = polys_[k];
        for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            u64 v = coef_mod[k][ti];
            for (auto [var, e] : ts[ti].factors)
                for (unsigned j = 0; j < e; ++j) v = v * x[var] % q;
            acc += v;
            if (acc >= q) acc -= q;
        }
        out[k] = acc;
    }
}

std::optional<SeparableSystem> separable_parts(const PolynomialSystem& sys) {
    SeparableSystem s;
    s.n = sys.nvars();
    s.r = sys.size();
    s.univariate.assign(s.n, std::vector<std::vector<mpz_class>>(s.r));
    s.constants.assign(s.r, 0);
    for (std::size_t k = 0; k < s.r; ++k) {
        for (const auto& [m, c] : sys[k].terms()) {
            int var = -1;
            for (std::size_t i = 0; i < s.n; ++i) {
                if (!m.exps[i]) continue;
                if (var >= 0) return std::nullopt;
                var = (int)i;
            }
            if (var < 0) {
                s.constants[k] = c;
                continue;
            }
            auto& coeffs = s.univariate[var][k];
            unsigned e = m.exps[var];
            if (coeffs.size() <= e) coeffs.resize(e + 1, 0);
            coeffs[e] = c;
        }
    }
    return s;
}

void VariableSplit::validate(std::size_t n) const {
    std::vector<int> seen(n, 0);
    for (const auto* blk : {&k_block, &y_block, &z_block})
        for (std::size_t v : *blk) {
            if (v >= n) throw InvalidInput("variable split: index " + std::to_string(v + 1) + " exceeds n=" + std::to_string(n));
            if (seen[v]++) throw InvalidInput("variable split: x" + std::to_string(v + 1) + " appears in more than one block");
        }
    for (std::size_t v = 0; v < n; ++v)
        if (!seen[v]) throw InvalidInput("variable split: x" + std::to_string(v + 1) + " is not covered");
}

SplitDecomposition split(const PolynomialSystem& sys, const VariableSplit& vs) {
    std::size_t n = sys.nvars();
    vs.validate(n);
    std::vector<char> in_y(n, 0), in_z(n, 0);
    for (std::size_t v : vs.y_block) in_y[v] = 1;
    for (std::size_t v : vs.z_block) in_z[v] = 1;
    std::vector<Polynomial> f1, g, f2;
    for (const auto& p : sys.polys()) {
        Polynomial a(n), b(n), c(n);
        for (const auto& [m, coef] : p.terms()) {
            bool hy = false, hz = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (!m.exps[i]) continue;
                hy |= (bool)in_y[i];
                hz |= (bool)in_z[i];
            }
            (hy && hz ? b : hy ? a : c).add_term(m, coef);
        }
        f1.push_back(std::move(a));
        g.push_back(std::move(b));
        f2.push_back(std::move(c));
    }
    return {PolynomialSystem(n, std::move(f1)), PolynomialSystem(n, std::move(g)), PolynomialSystem(n, std::move(f2))};
}

PolynomialSystem recombine(const SplitDecomposition& d) {
    std::vector<Polynomial> out;
    for (std::size_t k = 0; k < d.f1.size(); ++k) out.push_back(d.f1[k] + d.g[k] + d.f2[k]);
    return PolynomialSystem(d.f1.nvars(), std::move(out));
}

std::map<Monomial, PolynomialSystem> coefficient_forms(const PolynomialSystem& sys, const VariableSplit& vs) {
    std::size_t n = sys.nvars();
    vs.validate(n);
    std::map<Monomial, std::vector<Polynomial>> acc;
    for (std::size_t k = 0; k < sys.size(); ++k) {
        for (const auto& [m, c] : sys[k].terms()) {
            Monomial ym(n), rest = m;
            for (std::size_t v : vs.y_block) {
                ym.exps[v] = m.exps[v];
                rest.exps[v] = 0;
            }
            auto it = acc.find(ym);
            if (it == acc.end()) it = acc.emplace(ym, std::vector<Polynomial>(sys.size(), Polynomial(n))).first;
            it->second[k].add_term(rest, c);
        }
    }
    std::map<Monomial, PolynomialSystem> out;
    for (auto& [m, ps] : acc) out.emplace(m, PolynomialSystem(n, std::move(ps)));
    return out;
}

namespace {

struct Lexer {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool done() {
        skip();
        return pos >= s.size();
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    std::string digits() {
        skip();
        std::size_t b = pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        if (b == pos) fail("expected digits");
        return s.substr(b, pos - b);
    }
    [[noreturn]] void fail(const std::string& what) {
        throw InvalidInput("polynomial text at offset " + std::to_string(pos) + ": " + what + " in \"" + s + "\"");
    }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, std::size_t n) {
    Lexer lx{text};
    Polynomial p(n);
    if (lx.done()) lx.fail("empty polynomial");
    bool first = true;
    while (!lx.done()) {
        int sign = 1;
        char c = lx.peek();
        if (c == '+' || c == '-') {
            sign = c == '-' ? -1 : 1;
            ++lx.pos;
        } else if (!first) {
            lx.fail("expected + or -");
        }
        first = false;
        mpz_class coef = 1;
        bool have_coef = false, have_factor = false;
        if (std::isdigit((unsigned char)lx.peek())) {
            coef = mpz_class(lx.digits());
            have_coef = true;
            if (lx.peek() == '*') ++lx.pos;
        }
        Monomial m(n);
        while (lx.peek() == 'x') {
            ++lx.pos;
            std::size_t idx = std::stoul(lx.digits());
            if (idx < 1 || idx > n) lx.fail("variable x" + std::to_string(idx) + " outside x1..x" + std::to_string(n));
            unsigned e = 1;
            if (lx.peek() == '^') {
                ++lx.pos;
                e = (unsigned)std::stoul(lx.digits());
            }
            m.exps[idx - 1] += e;
            have_factor = true;
            if (lx.peek() == '*') ++lx.pos;
        }
        if (!have_coef && !have_factor) lx.fail("expected a coefficient or variable");
        p.add_term(m, sign * coef);
    }
    return p;
}

std::string format_polynomial(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        mpz_class a = abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        bool constant = m.is_constant();
        if (constant || a != 1) os << a.get_str() << (constant ? "" : " * ");
        bool sep = false;
        for (std::size_t i = 0; i < m.nvars(); ++i) {
            if (!m.exps[i]) continue;
            if (sep) os << ' ';
            os << 'x' << i + 1;
            if (m.exps[i] > 1) os << '^' << m.exps[i];
            sep = true;
        }
    }
    return os.str();
}

PolynomialSystem parse_system(const std::string& text, std::size_t n) {
    std::vector<Polynomial> polys;
    std::string item;
    auto flush = [&] {
        if (item.find_first_not_of(" \t\r") != std::string::npos) polys.push_back(parse_polynomial(item, n));
        item.clear();
    };
    for (char c : text) {
        if (c == '\n' || c == ';')
            flush();
        else
            item += c;
    }
    flush();
    return PolynomialSystem(n, std::move(polys));
}

}  // namespace cm
