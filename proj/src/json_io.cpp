#include "cm/json_io.hpp"

#include <fstream>
#include <sstream>

namespace cm {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw InvalidInput(field + ": " + what);
}

mpz_class parse_coef(const json& c, const std::string& field) {
    if (c.is_number_integer()) return mpz_class(std::to_string(c.get<long long>()));
    if (!c.is_string()) bad(field, "expected a decimal string");
    std::string s = c.get<std::string>();
    mpz_class v;
    if (s.empty() || v.set_str(s, 10) != 0) bad(field, "not a decimal integer: '" + s + "'");
    return v;
}

json bound(long v) { return v == kInfiniteRank ? json("inf") : json(v); }

}  // namespace

PolynomialSystem system_from_json(const json& j) {
    if (!j.is_object()) bad("system", "expected an object");
    if (!j.contains("n")) bad("n", "missing");
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) bad("n", "expected a positive integer");
    std::size_t n = j["n"].get<std::size_t>();
    if (!j.contains("polys")) bad("polys", "missing");
    if (!j["polys"].is_array()) bad("polys", "expected an array");
    std::vector<Polynomial> ps;
    for (std::size_t k = 0; k < j["polys"].size(); ++k) {
        const json& pj = j["polys"][k];
        std::string pf = "polys[" + std::to_string(k) + "]";
        if (pj.is_string()) {
            try {
                ps.push_back(parse_polynomial(pj.get<std::string>(), n));
            } catch (const InvalidInput& e) {
                bad(pf, e.what());
            }
            continue;
        }
        if (!pj.is_object() || !pj.contains("terms") || !pj["terms"].is_array())
            bad(pf + ".terms", "expected an array of terms");
        Polynomial p(n);
        for (std::size_t t = 0; t < pj["terms"].size(); ++t) {
            const json& tj = pj["terms"][t];
            std::string tf = pf + ".terms[" + std::to_string(t) + "]";
            if (!tj.is_object()) bad(tf, "expected an object");
            if (!tj.contains("exps") || !tj["exps"].is_array()) bad(tf + ".exps", "expected an array");
            if (tj["exps"].size() != n)
                bad(tf + ".exps", "length " + std::to_string(tj["exps"].size()) + " != n = " + std::to_string(n));
            Monomial m(n);
            for (std::size_t i = 0; i < n; ++i) {
                const json& e = tj["exps"][i];
                if (!e.is_number_integer() || e.get<long long>() < 0)
                    bad(tf + ".exps[" + std::to_string(i) + "]", "expected a non-negative integer");
                m.exps[i] = e.get<unsigned>();
            }
            if (!tj.contains("coef")) bad(tf + ".coef", "missing");
            p.add_term(m, parse_coef(tj["coef"], tf + ".coef"));
        }
        ps.push_back(std::move(p));
    }
    return PolynomialSystem(n, std::move(ps));
}

json polynomial_to_json(const Polynomial& p) {
    json terms = json::array();
    // highest term first, matching the text format
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it)
        terms.push_back({{"exps", it->first.exps}, {"coef", it->second.get_str()}});
    return {{"terms", terms}};
}

json system_to_json(const PolynomialSystem& sys) {
    json polys = json::array();
    for (const auto& p : sys.polys()) polys.push_back(polynomial_to_json(p));
    return {{"n", sys.nvars()}, {"polys", polys}};
}

VariableSplit split_from_json(const json& j, std::size_t n) {
    VariableSplit vs;
    auto block = [&](const char* key, std::vector<std::size_t>& out) {
        if (!j.contains(key)) return;
        if (!j[key].is_array()) bad(std::string("split.") + key, "expected an array");
        for (std::size_t i = 0; i < j[key].size(); ++i) {
            const json& v = j[key][i];
            if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<std::size_t>() > n)
                bad(std::string("split.") + key + "[" + std::to_string(i) + "]",
                    "expected a variable index in 1.." + std::to_string(n));
            out.push_back(v.get<std::size_t>() - 1);
        }
    };
    block("k", vs.k_block);
    block("y", vs.y_block);
    block("z", vs.z_block);
    vs.validate(n);
    return vs;
}

json split_to_json(const VariableSplit& vs) {
    auto one_based = [](const std::vector<std::size_t>& v) {
        std::vector<std::size_t> o;
        for (auto x : v) o.push_back(x + 1);
        return o;
    };
    return {{"k", one_based(vs.k_block)}, {"y", one_based(vs.y_block)}, {"z", one_based(vs.z_block)}};
}

json decomposition_to_json(const ProductDecomposition& d) {
    json prods = json::array();
    for (std::size_t i = 0; i < d.length(); ++i)
        prods.push_back({{"coef", d.coef[i].get_str()}, {"U", format_polynomial(d.U[i])}, {"V", format_polynomial(d.V[i])}});
    return {{"scale", d.scale.get_str()}, {"products", prods}, {"W", format_polynomial(d.W)}};
}

json rank_report_to_json(const RankReport& r) {
    json j = {{"lower", bound(r.lower)}, {"upper", bound(r.upper)}, {"method", to_string(r.method)}};
    if (r.witness) {
        json w;
        std::vector<std::string> lam;
        for (const auto& x : r.witness->lambda) lam.push_back(x.get_str());
        w["lambda"] = lam;
        if (r.witness->decomposition) w["decomposition"] = decomposition_to_json(*r.witness->decomposition);
        if (!r.witness->columns.empty()) {
            std::vector<std::size_t> cols;
            for (auto c : r.witness->columns) cols.push_back(c + 1);
            w["columns"] = cols;
        }
        j["witness"] = w;
    }
    if (!r.per_prime.empty()) {
        json pp = json::array();
        for (const auto& e : r.per_prime)
            pp.push_back({{"p", e.p}, {"points", e.points}, {"singular", e.singular}, {"exhaustive", e.exhaustive},
                          {"codim", e.codim}});
        j["per_prime"] = pp;
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

PolynomialSystem read_system_file(const std::string& path) { return system_from_json(read_json_file(path)); }

}  // namespace cm
