#include "cm/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cm {

// ---------------------------------------------------------------- targets

RankTarget RankTarget::constant(long c) {
    RankTarget t;
    t.table = {c};
    return t;
}

RankTarget RankTarget::parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidInput("rank target '" + text + "': expected kind:values");
    std::string kind = text.substr(0, colon), rest = text.substr(colon + 1);
    auto numbers = [&](const std::string& s) {
        std::vector<long> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                out.push_back(std::stol(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw InvalidInput("rank target '" + text + "': bad number '" + item + "'");
            }
        }
        if (out.empty()) throw InvalidInput("rank target '" + text + "': no values");
        return out;
    };
    RankTarget t;
    if (kind == "const") {
        auto v = numbers(rest);
        if (v.size() != 1) throw InvalidInput("rank target '" + text + "': const takes one value");
        t.table = v;
    } else if (kind == "affine") {
        auto v = numbers(rest);
        if (v.size() != 2 || v[1] < 0) throw InvalidInput("rank target '" + text + "': affine takes a, b >= 0");
        t.table = {v[0]};
        t.slope = v[1];
    } else if (kind == "table") {
        auto semi = rest.find(';');
        t.table = numbers(rest.substr(0, semi));
        if (semi != std::string::npos) {
            std::string s = rest.substr(semi + 1);
            if (s.rfind("slope:", 0) != 0) throw InvalidInput("rank target '" + text + "': expected ;slope:b");
            auto v = numbers(s.substr(6));
            if (v.size() != 1 || v[0] < 0) throw InvalidInput("rank target '" + text + "': bad slope");
            t.slope = v[0];
        }
        for (std::size_t i = 1; i < t.table.size(); ++i)
            if (t.table[i] < t.table[i - 1]) throw InvalidInput("rank target '" + text + "': table must be non-decreasing");
    } else {
        throw InvalidInput("rank target '" + text + "': unknown kind '" + kind + "'");
    }
    return t;
}

long RankTarget::operator()(long R) const {
    if (R < 0) R = 0;
    if ((std::size_t)R < table.size()) return table[R];
    return table.back() + slope * (R - (long)table.size() + 1);
}

long RankTargetFamily::at(int degree, long R) const {
    auto it = F.find(degree);
    return it == F.end() ? 0 : it->second(R);
}

// ---------------------------------------------------------------- expressions

namespace {

void add_to(Expression& e, const ExprKey& k, const mpq_class& c) {
    if (c == 0) return;
    auto it = e.find(k);
    if (it == e.end()) {
        e.emplace(k, c);
    } else {
        it->second += c;
        if (it->second == 0) e.erase(it);
    }
}

Expression multiply(const Expression& a, const Expression& b) {
    Expression out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            ExprKey k = ka;
            k.insert(k.end(), kb.begin(), kb.end());
            std::sort(k.begin(), k.end());
            add_to(out, k, ca * cb);
        }
    return out;
}

Expression substitute(const Expression& e, std::size_t id, const Expression& repl) {
    Expression out;
    for (const auto& [k, c] : e) {
        ExprKey rest;
        int mult = 0;
        for (auto x : k) {
            if (x == id)
                ++mult;
            else
                rest.push_back(x);
        }
        Expression t{{rest, c}};
        for (int i = 0; i < mult; ++i) t = multiply(t, repl);
        for (const auto& [kk, cc] : t) add_to(out, kk, cc);
    }
    return out;
}

QVector linear_row(const Polynomial& p) {
    QVector row(p.nvars(), 0);
    for (const auto& [m, c] : p.terms())
        for (std::size_t j = 0; j < p.nvars(); ++j)
            if (m.exps[j]) row[j] = c;
    return row;
}

// Integer matrix 2A of a quadratic form.
ZMatrix doubled_matrix(const Polynomial& f) {
    std::size_t n = f.nvars();
    ZMatrix M(n, std::vector<mpz_class>(n, 0));
    for (const auto& [m, c] : f.terms()) {
        std::size_t a = n, b = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (m.exps[j] == 2) a = b = j;
            else if (m.exps[j] == 1) (a == n ? a : b) = j;
        }
        if (a == b)
            M[a][a] = 2 * c;
        else
            M[a][b] = M[b][a] = c;
    }
    return M;
}

constexpr u64 kScreenPrime = 2147483647ULL;  // 2^31 - 1

struct Form {
    std::size_t id;
    Polynomial poly;
    int degree;
    bool pure_z;
};

struct Candidate {
    bool found = false;
    std::vector<std::size_t> members;
    std::vector<long> lambda;
    ProductDecomposition d;
    bool dependent = false;
    std::size_t length = 0;
};

class Engine {
public:
    Engine(const PolynomialSystem& sys, const std::vector<bool>& is_y, bool parametric, int H)
        : n_(sys.nvars()), is_y_(is_y), parametric_(parametric), H_(H) {
        for (std::size_t k = 0; k < sys.size(); ++k) {
            const Polynomial& f = sys[k];
            exprs_.emplace_back();
            if (f.is_zero()) continue;
            int d = f.degree();
            if (!f.is_homogeneous() || (d != 1 && d != 2))
                throw InvalidInput("member " + std::to_string(k + 1) + " is not a homogeneous form of degree 1 or 2");
            std::size_t id = next_id_++;
            forms_.push_back({id, f, d, d == 2 && is_pure_z(f)});
            exprs_.back()[{id}] = 1;
            if (d == 1) reselect_linear(id);
        }
    }

    long quad_count(bool pure_z) const {
        long c = 0;
        for (const auto& f : forms_) c += f.degree == 2 && f.pure_z == pure_z;
        return c;
    }
    long potential() const { return parametric_ ? 2 * quad_count(false) + quad_count(true) : quad_count(false) + quad_count(true); }

    void run(const RankTargetFamily& targets, Regularization& reg) {
        reg.step_bound = potential();
        while (true) {
            long R = (long)forms_.size();
            long F2 = targets.at(2, R);
            if (parametric_) {
                Candidate c = scan_modified(F2);
                if (c.found) {
                    apply(c, "modified", reg);
                    continue;
                }
            }
            Candidate c = scan_complex(F2);
            if (c.found) {
                apply(c, c.dependent ? "dependent" : "product", reg);
                continue;
            }
            break;
        }
        // final certificates (no candidate exists, so the scans return the minima)
        long F2 = targets.at(2, (long)forms_.size());
        scan_complex(F2, &reg.certified_h_lower);
        if (parametric_) scan_modified(F2, &reg.certified_modified_lower);
        finish(reg);
    }

private:
    bool is_pure_z(const Polynomial& f) const {
        for (std::size_t j = 0; j < n_; ++j)
            if (is_y_[j] && f.depends_on(j)) return false;
        return true;
    }

    std::vector<std::vector<long>> lattice(std::size_t r, Regularization* note_to = nullptr) {
        if (r == 1) return {{1}};
        int H = H_;
        while (H > 1 && std::pow(2.0 * H + 1, (double)r) / 2 > 2e5) --H;
        if (H != H_ && note_to) note_to->notes.push_back("lattice height reduced to " + std::to_string(H));
        used_height_ = std::min(used_height_, H);
        return lambda_lattice(r, H);
    }

    Polynomial combination(const std::vector<std::size_t>& idx, const std::vector<long>& lam) const {
        Polynomial p(n_);
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (lam[k]) p += forms_[idx[k]].poly * mpz_class(lam[k]);
        return p;
    }

    // Combinations of all quadratics with ceil(rank/2) < F2. With `minimum`, report the smallest
    // certified lower bound over the lattice instead.
    Candidate scan_complex(long F2, long* minimum = nullptr) {
        Candidate best;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < forms_.size(); ++i)
            if (forms_[i].degree == 2) idx.push_back(i);
        if (idx.empty()) {
            if (minimum) *minimum = kInfiniteRank;
            return best;
        }
        std::vector<ZMatrix> M;
        std::vector<std::vector<std::vector<u64>>> Mp;
        for (auto i : idx) {
            M.push_back(doubled_matrix(forms_[i].poly));
            std::vector<std::vector<u64>> mp(n_, std::vector<u64>(n_));
            for (std::size_t a = 0; a < n_; ++a)
                for (std::size_t b = 0; b < n_; ++b) {
                    mpz_class r;
                    mpz_fdiv_r_ui(r.get_mpz_t(), M.back()[a][b].get_mpz_t(), kScreenPrime);
                    mp[a][b] = r.get_ui();
                }
            Mp.push_back(std::move(mp));
        }
        long lowest = kInfiniteRank;
        long limit = 2 * F2 - 2;  // ceil(rank/2) < F2  <=>  rank <= 2 F2 - 2
        for (const auto& lam : lattice(idx.size())) {
            std::vector<std::vector<u64>> C(n_, std::vector<u64>(n_, 0));
            for (std::size_t k = 0; k < idx.size(); ++k) {
                if (!lam[k]) continue;
                u64 l = (u64)mod_floor(lam[k], (i64)kScreenPrime);
                for (std::size_t a = 0; a < n_; ++a)
                    for (std::size_t b = 0; b < n_; ++b) C[a][b] = (C[a][b] + mulmod(l, Mp[k][a][b], kScreenPrime)) % kScreenPrime;
            }
            long rk = (long)rank_mod_p(C, kScreenPrime);
            if (rk <= limit || (minimum && (rk + 1) / 2 < lowest)) {
                ZMatrix Z(n_, std::vector<mpz_class>(n_, 0));
                for (std::size_t k = 0; k < idx.size(); ++k)
                    if (lam[k])
                        for (std::size_t a = 0; a < n_; ++a)
                            for (std::size_t b = 0; b < n_; ++b) Z[a][b] += lam[k] * M[k][a][b];
                rk = (long)rank(Z);
            }
            lowest = std::min(lowest, (rk + 1) / 2);
            if (minimum || rk > limit) continue;
            Candidate c;
            c.found = true;
            c.lambda = lam;
            c.members = idx;
            if (rk == 0) {
                c.dependent = true;
                c.length = 0;
            } else {
                c.d = decompose_quadratic(combination(idx, lam), std::vector<bool>(n_, true));
                c.length = c.d.length();
            }
            if (!best.found || c.length < best.length) best = std::move(c);
            if (best.dependent) break;
        }
        if (minimum) *minimum = lowest;
        return best;
    }

    // Combinations of the quadratics involving non-z variables whose modified rank lower bound is < F2.
    Candidate scan_modified(long F2, long* minimum = nullptr) {
        Candidate best;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < forms_.size(); ++i)
            if (forms_[i].degree == 2 && !forms_[i].pure_z) idx.push_back(i);
        if (idx.empty()) {
            if (minimum) *minimum = kInfiniteRank;
            return best;
        }
        long lowest = kInfiniteRank;
        for (const auto& lam : lattice(idx.size())) {
            Polynomial p = combination(idx, lam);
            long lo = p.is_zero() ? 0 : modified_rank_lower(p, is_y_);
            lowest = std::min(lowest, lo);
            if (minimum || lo >= F2) continue;
            Candidate c;
            c.found = true;
            c.lambda = lam;
            c.members = idx;
            if (p.is_zero()) {
                c.dependent = true;
            } else {
                c.d = decompose_quadratic(p, is_y_);
                c.length = c.d.length();
            }
            if (!best.found || c.length < best.length) best = std::move(c);
            if (best.dependent) break;
        }
        if (minimum) *minimum = lowest;
        return best;
    }

    std::size_t position(std::size_t id) const {
        for (std::size_t i = 0; i < forms_.size(); ++i)
            if (forms_[i].id == id) return i;
        throw std::logic_error("unknown form id");
    }

    void replace_everywhere(std::size_t id, const Expression& repl) {
        for (auto& e : exprs_) e = substitute(e, id, repl);
        forms_.erase(forms_.begin() + (long)position(id));
    }

    std::size_t add_form(Polynomial p) {
        std::size_t id = next_id_++;
        int d = p.degree();
        bool pz = d == 2 && is_pure_z(p);
        forms_.push_back({id, std::move(p), d, pz});
        return id;
    }

    // Keep a new linear form only if it is independent of the current linear forms.
    bool reselect_linear(std::size_t id) {
        QMatrix basis;
        std::vector<std::size_t> basis_ids;
        for (const auto& f : forms_)
            if (f.degree == 1 && f.id != id) {
                basis.push_back(linear_row(f.poly));
                basis_ids.push_back(f.id);
            }
        auto coords = basis.empty() ? std::nullopt : coordinates_in_span(basis, linear_row(forms_[position(id)].poly));
        if (!coords) return true;
        Expression repl;
        for (std::size_t b = 0; b < basis_ids.size(); ++b) add_to(repl, {basis_ids[b]}, (*coords)[b]);
        replace_everywhere(id, repl);
        return false;
    }

    void apply(const Candidate& c, const std::string& kind, Regularization& reg) {
        RegStep step;
        step.kind = kind;
        for (auto i : c.members) step.members.push_back(forms_[i].id);
        for (long l : c.lambda) step.lambda.emplace_back(l);
        std::size_t piv = 0;
        for (std::size_t k = 0; k < c.lambda.size(); ++k)
            if (c.lambda[k]) piv = k;
        std::size_t pivot_id = step.members[piv];
        step.pivot = pivot_id;
        mpq_class lp = c.lambda[piv];

        // f_pivot = ( (sum coef U V + W) / scale - sum_{j != pivot} lambda_j f_j ) / lambda_pivot
        Expression repl;
        std::vector<std::size_t> new_linear;
        if (!c.dependent) {
            step.decomposition = c.d;
            mpq_class base = 1 / (mpq_class(c.d.scale) * lp);
            for (std::size_t k = 0; k < c.d.length(); ++k) {
                std::size_t u = add_form(c.d.U[k]);
                std::size_t v = u;
                if (!(c.d.V[k] == c.d.U[k])) v = add_form(c.d.V[k]);
                new_linear.push_back(u);
                if (v != u) new_linear.push_back(v);
                ExprKey key{u, v};
                std::sort(key.begin(), key.end());
                add_to(repl, key, base * c.d.coef[k]);
            }
            if (!c.d.W.is_zero()) {
                mpz_class g = c.d.W.content();
                Polynomial w = c.d.W;
                Polynomial wprim(n_);
                for (const auto& [m, cc] : w.terms()) wprim.add_term(m, cc / g);
                std::size_t wid = add_form(wprim);
                step.adjoined.push_back(wid);
                add_to(repl, {wid}, base * g);
            }
        }
        for (std::size_t j = 0; j < c.lambda.size(); ++j)
            if (j != piv && c.lambda[j]) add_to(repl, {step.members[j]}, -mpq_class(c.lambda[j]) / lp);
        replace_everywhere(pivot_id, repl);
        for (auto id : new_linear)
            if (reselect_linear(id)) step.adjoined.push_back(id);
        step.quadratic_after = quad_count(false);
        step.pure_z_after = quad_count(true);
        reg.log.push_back(std::move(step));
        if ((long)reg.log.size() > reg.step_bound)
            throw std::logic_error("regularization exceeded its induction measure");
    }

    void finish(Regularization& reg) {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < forms_.size(); ++i)
            if (forms_[i].degree == 2 && !forms_[i].pure_z) order.push_back(i);
        for (std::size_t i = 0; i < forms_.size(); ++i)
            if (forms_[i].degree == 2 && forms_[i].pure_z) order.push_back(i);
        for (std::size_t i = 0; i < forms_.size(); ++i)
            if (forms_[i].degree == 1) order.push_back(i);
        std::map<std::size_t, std::size_t> pos;
        std::vector<Polynomial> out;
        for (auto i : order) {
            pos[forms_[i].id] = out.size();
            reg.output_ids.push_back(forms_[i].id);
            out.push_back(forms_[i].poly);
            if (forms_[i].degree == 1) ++reg.linear_count;
            else if (forms_[i].pure_z) ++reg.pure_z_count;
            else ++reg.quadratic_count;
        }
        if (!parametric_) {
            reg.quadratic_count += reg.pure_z_count;
            reg.pure_z_count = 0;
        }
        reg.output = PolynomialSystem(n_, out);
        for (const auto& e : exprs_) {
            Expression m;
            for (const auto& [k, c] : e) {
                ExprKey kk;
                for (auto id : k) kk.push_back(pos.at(id));
                std::sort(kk.begin(), kk.end());
                add_to(m, kk, c);
            }
            reg.expressions.push_back(std::move(m));
        }
        reg.lattice_height = used_height_;
    }

    std::size_t n_;
    std::vector<bool> is_y_;
    bool parametric_;
    int H_;
    int used_height_ = 1 << 20;
    std::size_t next_id_ = 0;
    std::vector<Form> forms_;
    std::vector<Expression> exprs_;
};

void check_degrees(const PolynomialSystem& sys) {
    if (sys.max_degree() > 2) throw InvalidInput("regularize: only degrees 1 and 2 are supported");
}

}  // namespace

bool verify_expressions(const Regularization& reg) {
    std::size_t n = reg.input.nvars();
    for (std::size_t k = 0; k < reg.input.size(); ++k) {
        mpz_class L = 1;
        for (const auto& [key, c] : reg.expressions[k]) L = lcm(L, c.get_den());
        Polynomial rhs(n);
        for (const auto& [key, c] : reg.expressions[k]) {
            mpq_class s = c * L;
            Polynomial t = Polynomial::constant(n, s.get_num());
            for (auto i : key) t = t * reg.output[i];
            rhs += t;
        }
        if (!(reg.input[k] * L == rhs)) return false;
    }
    return true;
}

Regularization regularize(const PolynomialSystem& sys, const RankTargetFamily& targets, int lattice_height) {
    check_degrees(sys);
    Regularization reg;
    reg.input = sys;
    Engine e(sys, std::vector<bool>(sys.nvars(), true), false, lattice_height);
    e.run(targets, reg);
    if (sys.size() > 1) reg.notes.push_back("rank certificates cover the combination lattice only");
    return reg;
}

Regularization regularize_parametric(const PolynomialSystem& sys, const VariableSplit& vs,
                                     const RankTargetFamily& targets, int lattice_height) {
    check_degrees(sys);
    vs.validate(sys.nvars());
    std::vector<bool> is_y(sys.nvars(), true);
    for (auto z : vs.z_block) is_y[z] = false;
    Regularization reg;
    reg.input = sys;
    Engine e(sys, is_y, true, lattice_height);
    e.run(targets, reg);
    if (sys.size() > 1) reg.notes.push_back("rank certificates cover the combination lattice only");
    return reg;
}

// ---------------------------------------------------------------- split selection

namespace {

RankReport birch_of(const PolynomialSystem& sys, int d, const std::vector<u64>& primes, u64 box) {
    bool all_zero = true;
    for (const auto& p : sys.polys()) all_zero &= p.is_zero();
    if (all_zero) {
        RankReport r;
        r.lower = r.upper = 0;
        r.method = d == 1 ? RankMethod::exact_linear : RankMethod::exact_quadratic_matrix;
        return r;
    }
    if (d == 1) return linear_rank(sys);
    if (d == 2 && sys.size() == 1) {
        if (sys[0].is_zero()) {
            RankReport r;
            r.lower = r.upper = 0;
            r.method = RankMethod::exact_quadratic_matrix;
            return r;
        }
        return quadratic_birch_rank(sys[0]);
    }
    return birch_rank_estimate(sys, primes, box);
}

PolynomialSystem mixed_part(const SplitDecomposition& d) {
    std::vector<Polynomial> ps;
    for (std::size_t k = 0; k < d.f1.size(); ++k) ps.push_back(d.f1[k] + d.g[k]);
    return PolynomialSystem(d.f1.nvars(), ps);
}

VariableSplit split_for(std::size_t n, std::vector<std::size_t> I) {
    std::sort(I.begin(), I.end());
    VariableSplit vs;
    vs.y_block = I;
    for (std::size_t j = 0; j < n; ++j)
        if (!std::binary_search(I.begin(), I.end(), j)) vs.z_block.push_back(j);
    return vs;
}

std::string bound_text(const RankReport& r) {
    auto s = [](long v) { return v == kInfiniteRank ? std::string("inf") : std::to_string(v); };
    return "[" + s(r.lower) + ", " + s(r.upper) + "]";
}

}  // namespace

SplitSelection select_split(const PolynomialSystem& sys, long C1, long C2, const std::vector<u64>& primes, u64 box) {
    std::size_t n = sys.nvars(), r = sys.size();
    if (r == 0) throw InvalidInput("select_split: empty system");
    if (C1 < 1 || C2 < 0) throw InvalidInput("select_split: need C1 >= 1 and C2 >= 0");
    int d = sys.max_degree();
    for (std::size_t k = 0; k < r; ++k)
        if (sys[k].is_zero() || sys[k].degree() != d || !sys[k].is_homogeneous())
            throw InvalidInput("select_split: member " + std::to_string(k + 1) + " is not a nonzero form of degree " +
                               std::to_string(d));
    SplitSelection sel;
    long rl = (long)r;
    sel.threshold = d == 1 ? C2 + C1 * rl : C2 + C1 * (rl * rl + rl);
    sel.rank_f = birch_of(sys, d, primes, box);
    if (sel.rank_f.lower < sel.threshold)
        throw SplitError("select_split: Birch rank bounds " + bound_text(sel.rank_f) + " do not reach the threshold " +
                             std::to_string(sel.threshold),
                         sel);

    std::vector<std::size_t> I;
    if (d == 1) {
        // C1 disjoint nonsingular r x r column blocks, each the leftmost available.
        ZMatrix A = linear_coefficients(sys);
        std::vector<bool> used(n, false);
        for (long b = 0; b < C1; ++b) {
            std::vector<std::size_t> block;
            QMatrix cols;
            for (std::size_t j = 0; j < n && block.size() < r; ++j) {
                if (used[j]) continue;
                QVector c;
                for (std::size_t k = 0; k < r; ++k) c.push_back(A[k][j]);
                cols.push_back(c);
                if (rank(cols) == cols.size()) {
                    block.push_back(j);
                } else {
                    cols.pop_back();
                }
            }
            if (block.size() < r) break;
            for (auto j : block) used[j] = true;
            sel.minors.push_back(block);
            I.insert(I.end(), block.begin(), block.end());
        }
    } else if (d == 2 && r == 1) {
        QMatrix A = quadratic_matrix(sys[0]);
        auto rows = leftmost_independent_rows(A);
        for (std::size_t i = 0; i < rows.size() && (long)I.size() < C1; ++i) {
            I.push_back(rows[i]);
            sel.minors.push_back({rows[i]});
        }
    } else {
        // Column-by-column greedy on the finite-field estimate of the mixed part.
        long cap = C1 * rl;
        while ((long)I.size() < cap) {
            long best = -1;
            std::size_t bestj = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (std::find(I.begin(), I.end(), j) != I.end()) continue;
                auto J = I;
                J.push_back(j);
                auto dec = split(sys, split_for(n, J));
                long est = birch_of(mixed_part(dec), d, primes, box).lower;
                if (est > best) {
                    best = est;
                    bestj = j;
                }
            }
            if (bestj == n) break;
            I.push_back(bestj);
            if (best >= C1) break;
        }
        sel.minors.push_back(I);
    }
    sel.split = split_for(n, I);
    sel.decomposition = split(sys, sel.split);
    sel.rank_f1g = birch_of(mixed_part(sel.decomposition), d, primes, box);
    sel.rank_f2 = birch_of(sel.decomposition.f2, d, primes, box);
    if (sel.rank_f1g.lower < C1 || sel.rank_f2.lower < C2)
        throw SplitError("select_split: achieved bounds " + bound_text(sel.rank_f1g) + " and " + bound_text(sel.rank_f2) +
                             " miss C1 = " + std::to_string(C1) + ", C2 = " + std::to_string(C2),
                         sel);
    return sel;
}

}  // namespace cm
