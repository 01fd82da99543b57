#include "cm/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <gmp.h>

#include "cm/arcs.hpp"
#include "cm/archimedean.hpp"
#include "cm/count.hpp"
#include "cm/error.hpp"
#include "cm/local.hpp"
#include "cm/rank.hpp"
#include "cm/regularize.hpp"
#include "cm/sieve.hpp"

namespace cm {

namespace {

enum class Kind { integer, number, string, int_list, number_list, ladder, object };

struct Field {
    Kind kind;
    json dflt;  // null: required
    bool optional = false;  // may stay null
};

using Schema = std::map<std::string, Field>;

const std::map<std::string, Schema>& schemas() {
    static const std::map<std::string, Schema> s = {
        {"count", {{"s", {Kind::int_list, nullptr}}, {"N", {Kind::integer, nullptr}}, {"mode", {Kind::string, "weighted"}}}},
        {"compare",
         {{"s", {Kind::int_list, nullptr}}, {"N", {Kind::integer, nullptr}}, {"Q", {Kind::integer, 500}}, {"Phi", {Kind::number, 64.0}}}},
        {"local",
         {{"s", {Kind::int_list, nullptr}}, {"p", {Kind::integer, nullptr}}, {"tmax", {Kind::integer, 4}}, {"t_cap", {Kind::integer, 8}}}},
        {"series", {{"s", {Kind::int_list, nullptr}}, {"Q", {Kind::integer, 200}}}},
        {"jint", {{"mu", {Kind::number_list, nullptr}}, {"Phi", {Kind::number, 64.0}}, {"Phi_min", {Kind::number, 4.0}}}},
        {"arcs-scan",
         {{"C", {Kind::number, 2.0}}, {"d", {Kind::integer, 1}}, {"ladder", {Kind::ladder, "10:16"}}, {"samples", {Kind::integer, 10000}}}},
        {"regularize",
         {{"F1", {Kind::string, "const:0"}}, {"F2", {Kind::string, "const:4"}}, {"height", {Kind::integer, 10}},
          {"split", {Kind::object, nullptr, true}}}},
        {"rank",
         {{"primes", {Kind::int_list, json::array({7, 11, 13})}}, {"box", {Kind::integer, 2000000}},
          {"solubility", {Kind::object, nullptr, true}}}},
        {"split", {{"C1", {Kind::integer, 1}}, {"C2", {Kind::integer, 4}}}},
    };
    return s;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) { throw InvalidInput(field + ": " + what); }

json resolve_field(const std::string& name, const Field& f, json v) {
    std::string where = "params." + name;
    switch (f.kind) {
    case Kind::integer:
        if (!v.is_number_integer()) bad(where, "expected an integer");
        return v;
    case Kind::number:
        if (!v.is_number()) bad(where, "expected a number");
        return v.get<double>();
    case Kind::string:
        if (!v.is_string()) bad(where, "expected a string");
        return v;
    case Kind::object:
        if (!v.is_object()) bad(where, "expected an object");
        return v;
    case Kind::int_list:
        if (v.is_number_integer()) return json::array({v});
        if (!v.is_array() || v.empty()) bad(where, "expected an integer or a non-empty list of integers");
        for (const auto& e : v)
            if (!e.is_number_integer()) bad(where, "expected integers");
        return v;
    case Kind::number_list: {
        if (v.is_number()) return json::array({v.get<double>()});
        if (!v.is_array() || v.empty()) bad(where, "expected a number or a non-empty list of numbers");
        json out = json::array();
        for (const auto& e : v) {
            if (!e.is_number()) bad(where, "expected numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    case Kind::ladder: {
        // "a:b" means N = 2^a, ..., 2^b
        if (v.is_string()) {
            std::string t = v.get<std::string>();
            auto colon = t.find(':');
            int a = 0, b = 0;
            try {
                if (colon == std::string::npos) throw std::invalid_argument("no colon");
                std::size_t ea = 0, eb = 0;
                a = std::stoi(t.substr(0, colon), &ea);
                b = std::stoi(t.substr(colon + 1), &eb);
                if (ea != colon || eb != t.size() - colon - 1) throw std::invalid_argument("trailing text");
            } catch (const std::exception&) {
                bad(where, "expected 'a:b' with integer exponents, got '" + t + "'");
            }
            if (a < 1 || b < a || b > 40) bad(where, "exponents must satisfy 1 <= a <= b <= 40");
            json out = json::array();
            for (int e = a; e <= b; ++e) out.push_back(1ULL << e);
            return out;
        }
        if (!v.is_array() || v.empty()) bad(where, "expected 'a:b' or a list of N");
        for (const auto& e : v)
            if (!e.is_number_integer() || e.get<long long>() < 2) bad(where, "N values must be integers >= 2");
        return v;
    }
    }
    return v;
}

std::vector<i64> ints(const json& v) { return v.get<std::vector<i64>>(); }
std::vector<u64> uints(const json& v, const std::string& where) {
    std::vector<u64> out;
    for (const auto& e : v) {
        if (e.get<long long>() < 0) bad(where, "expected non-negative integers");
        out.push_back(e.get<u64>());
    }
    return out;
}
u64 positive(const json& params, const std::string& key) {
    long long v = params[key].get<long long>();
    if (v < 1) bad("params." + key, "must be positive");
    return (u64)v;
}

PolynomialSystem load_system(const json& sys) {
    if (sys.is_string()) return read_system_file(sys.get<std::string>());
    if (sys.is_object()) {
        try {
            return system_from_json(sys);
        } catch (const InvalidInput& e) {
            throw InvalidInput(std::string("system.") + e.what());
        }
    }
    bad("system", "expected a file path or an inline system object");
}

std::string join(const std::vector<i64>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
    return s;
}

std::string num(double x) {
    std::ostringstream o;
    o.precision(17);
    o << x;
    return o.str();
}

SieveTable table_for(u64 N) {
    const char* dir = std::getenv(kSieveCacheEnv);
    return cached_sieve(std::max<u64>(N, 2), dir ? dir : "");
}

json comparison_json(const PredictionComparison& pc) {
    json j = {{"N", pc.N},
              {"s", pc.s},
              {"method", pc.method},
              {"count_weighted", pc.count_weighted},
              {"count_weighted_primes", pc.count_weighted_primes},
              {"prime_power_contribution", pc.prime_power_contribution},
              {"count_prime_only", pc.count_prime_only},
              {"sanity_ok", pc.sanity_ok}};
    if (pc.has_prediction) {
        j["Q"] = pc.Q;
        j["Phi"] = pc.Phi;
        j["singular_series"] = pc.singular_series;
        j["singular_series_euler"] = pc.singular_series_euler;
        j["singular_integral"] = pc.singular_integral;
        j["scale"] = pc.scale;
        j["predicted"] = pc.predicted;
        j["relative_error"] = pc.relative_error;
        j["errors"] = {{"heuristic", pc.heuristic_error}, {"singular_integral_tail", pc.singular_integral_tail}};
    }
    j["notes"] = pc.notes;
    return j;
}

json verdict_json(const SolubilityVerdict& v, u64 p) {
    return {{"p", p},
            {"kind", to_string(v.kind)},
            {"t", v.t},
            {"witness", v.witness},
            {"minor_valuation", v.minor_valuation},
            {"minor_columns", v.minor_columns},
            {"lifts_verified", v.lifts_verified}};
}

json expression_json(const Expression& e) {
    json out = json::array();
    for (const auto& [key, c] : e) out.push_back({{"monomial", key}, {"coef", c.get_str()}});
    return out;
}

json bound(long v) { return v == kInfiniteRank ? json("inf") : json(v); }

struct Output {
    json payload;
    std::string csv;
};

Output run_count(const PolynomialSystem& sys, const json& p) {
    auto s = ints(p["s"]);
    u64 N = positive(p, "N");
    CountMode mode;
    try {
        mode = parse_count_mode(p["mode"].get<std::string>());
    } catch (const InvalidInput& e) {
        bad("params.mode", e.what());
    }
    auto table = table_for(N);
    auto pc = count_prime_points(sys, s, N, &table);
    json j = comparison_json(pc);
    j["mode"] = to_string(mode);
    j["count"] = mode == CountMode::weighted ? json(pc.count_weighted) : json(pc.count_prime_only);
    std::string csv = "N,s,mode,count\n" + std::to_string(N) + "," + join(s, ";") + "," + to_string(mode) + "," +
                      (mode == CountMode::weighted ? num(pc.count_weighted) : std::to_string(pc.count_prime_only)) + "\n";
    return {j, csv};
}

Output run_compare(const PolynomialSystem& sys, const json& p) {
    auto s = ints(p["s"]);
    u64 N = positive(p, "N"), Q = positive(p, "Q");
    double Phi = p["Phi"].get<double>();
    auto table = table_for(N);
    auto pc = compare_with_prediction(sys, s, N, Q, Phi, &table);
    std::string csv = "N,s,Q,Phi,count_weighted,predicted,relative_error\n" + std::to_string(N) + "," + join(s, ";") +
                      "," + std::to_string(Q) + "," + num(Phi) + "," + num(pc.count_weighted) + "," + num(pc.predicted) +
                      "," + num(pc.relative_error) + "\n";
    return {comparison_json(pc), csv};
}

Output run_local(const PolynomialSystem& sys, const json& p) {
    auto s = ints(p["s"]);
    u64 prime = positive(p, "p");
    int tmax = (int)positive(p, "tmax"), t_cap = (int)positive(p, "t_cap");
    auto est = local_factor(sys, s, prime, tmax);
    json terms = json::array();
    std::string csv = "t,count,normalized\n";
    for (const auto& t : est.terms) {
        terms.push_back({{"t", t.t}, {"count", t.count.get_str()}, {"normalized", t.normalized.get_str()},
                         {"normalized_value", t.normalized.get_d()}});
        csv += std::to_string(t.t) + "," + t.count.get_str() + "," + t.normalized.get_str() + "\n";
    }
    json j = {{"p", est.p},         {"s", s},
              {"terms", terms},     {"stabilized", est.stabilized},
              {"t_star", est.t_star}, {"partial", est.partial},
              {"note", est.note}};
    j["solubility"] = verdict_json(local_solubility(sys, s, prime, t_cap), prime);
    return {j, csv};
}

Output run_series(const PolynomialSystem& sys, const json& p) {
    auto s = ints(p["s"]);
    u64 Q = positive(p, "Q");
    auto ss = singular_series(sys, s, Q);
    json per_q = json::array(), factors = json::array();
    std::string csv = "q,B\n";
    for (const auto& [q, b] : ss.per_q) {
        per_q.push_back({{"q", q}, {"B", b}});
        csv += std::to_string(q) + "," + num(b) + "\n";
    }
    for (const auto& [pr, f] : ss.factors) factors.push_back({{"p", pr}, {"factor", f}});
    json j = {{"s", s},           {"Q", Q},           {"value", ss.value}, {"euler", ss.euler}, {"per_q", per_q},
              {"factors", factors}, {"zero_factor", ss.zero_factor}, {"flagged", ss.flagged}};
    return {j, csv};
}

Output run_jint(const PolynomialSystem& sys, const json& p) {
    auto mu = p["mu"].get<std::vector<double>>();
    double Phi = p["Phi"].get<double>(), lo = p["Phi_min"].get<double>();
    if (!(lo > 0) || Phi < lo) bad("params.Phi", "need 0 < Phi_min <= Phi");
    std::vector<double> Phis;
    for (double x = lo; x <= Phi * (1 + 1e-12); x *= 2) Phis.push_back(x);
    auto ladder = singular_integral_ladder(sys, mu, Phis);
    json rows = json::array();
    std::string csv = "Phi,value,doubling_diff\n";
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto& e = ladder[i];
        double diff = i ? std::abs(e.value - ladder[i - 1].value) : 0.0;
        rows.push_back({{"Phi", e.Phi},
                        {"value", e.value},
                        {"imag", e.imag},
                        {"imag_flagged", e.imag_flagged},
                        {"doubling_diff", i ? json(diff) : json(nullptr)},
                        {"errors", {{"quadrature", e.quadrature_error}, {"tail_bound", e.tail_bound}}},
                        {"tail_constant", e.tail_constant},
                        {"nodes", e.nodes}});
        csv += num(e.Phi) + "," + num(e.value) + "," + (i ? num(diff) : std::string()) + "\n";
    }
    return {{{"mu", mu}, {"ladder", rows}, {"value", ladder.back().value}}, csv};
}

Output run_arcs_scan(const json& p) {
    double C = p["C"].get<double>();
    int d = (int)positive(p, "d");
    auto ladder = uints(p["ladder"], "params.ladder");
    long samples = (long)p["samples"].get<long long>();
    if (samples < 1) bad("params.samples", "must be positive");
    u64 Nmax = *std::max_element(ladder.begin(), ladder.end());
    if (Nmax > (1ULL << 28)) bad("params.ladder", "N above 2^28 is out of range for the sieve");
    auto table = table_for(Nmax);
    auto rows = minor_sup_scan(table, C, d, ladder, samples);
    json out = json::array();
    std::string csv = "N,sup_ratio,samples\n";
    for (const auto& r : rows) {
        out.push_back({{"N", r.N}, {"sup_ratio", r.sup_ratio}, {"samples", r.samples}, {"minor", r.minor}, {"argmax", r.argmax}});
        csv += std::to_string(r.N) + "," + num(r.sup_ratio) + "," + std::to_string(r.samples) + "\n";
    }
    return {{{"C", C}, {"d", d}, {"rows", out}}, csv};
}

Output run_regularize(const PolynomialSystem& sys, const json& p) {
    RankTargetFamily F;
    F.F[1] = RankTarget::parse(p["F1"].get<std::string>());
    F.F[2] = RankTarget::parse(p["F2"].get<std::string>());
    long h = p["height"].get<long>();
    if (h < 1 || h > 50) bad("params.height", "must lie in [1, 50]");
    Regularization reg = p["split"].is_null() ? regularize(sys, F, (int)h)
                                               : regularize_parametric(sys, split_from_json(p["split"], sys.nvars()), F, (int)h);
    json steps = json::array();
    for (const auto& st : reg.log) {
        std::vector<std::string> lam;
        for (const auto& l : st.lambda) lam.push_back(l.get_str());
        steps.push_back({{"kind", st.kind},
                         {"members", st.members},
                         {"lambda", lam},
                         {"pivot", st.pivot},
                         {"decomposition", decomposition_to_json(st.decomposition)},
                         {"adjoined", st.adjoined},
                         {"quadratic_after", st.quadratic_after},
                         {"pure_z_after", st.pure_z_after}});
    }
    json exprs = json::array();
    for (const auto& e : reg.expressions) exprs.push_back(expression_json(e));
    json j = {{"output", system_to_json(reg.output)},
              {"output_ids", reg.output_ids},
              {"expressions", exprs},
              {"expressions_verified", verify_expressions(reg)},
              {"log", steps},
              {"steps", reg.log.size()},
              {"step_bound", reg.step_bound},
              {"lattice_height", reg.lattice_height},
              {"linear_count", reg.linear_count},
              {"quadratic_count", reg.quadratic_count},
              {"pure_z_count", reg.pure_z_count},
              {"certified_h_lower", bound(reg.certified_h_lower)},
              {"certified_modified_lower", bound(reg.certified_modified_lower)},
              {"notes", reg.notes}};
    return {j, ""};
}

Output run_rank(const PolynomialSystem& sys, const json& p, u64 seed) {
    json j;
    int deg = sys.max_degree();
    bool homogeneous = sys.is_homogeneous();
    if (deg == 1 && homogeneous) {
        j["kind"] = "linear";
        j["linear_rank"] = rank_report_to_json(linear_rank(sys, seed));
    } else if (deg == 2 && homogeneous && sys.size() == 1) {
        j["kind"] = "quadratic";
        j["birch_rank"] = rank_report_to_json(quadratic_birch_rank(sys[0]));
        auto br = quadratic_schmidt_rank_complex(sys[0]);
        j["schmidt_complex"] = rank_report_to_json(br.complex);
        j["schmidt_rational"] = rank_report_to_json(br.rational);
    } else {
        j["kind"] = "estimate";
        j["birch_rank"] = rank_report_to_json(birch_rank_estimate(sys, uints(p["primes"], "params.primes"),
                                                                  positive(p, "box"), seed));
    }
    if (!p["solubility"].is_null()) {
        const json& sol = p["solubility"];
        for (auto it = sol.begin(); it != sol.end(); ++it)
            if (it.key() != "s" && it.key() != "primes" && it.key() != "t_cap")
                bad("params.solubility." + it.key(), "unknown key");
        if (!sol.contains("s")) bad("params.solubility.s", "missing");
        Field intlist{Kind::int_list, nullptr};
        auto s = ints(resolve_field("solubility.s", intlist, sol["s"]));
        auto primes = uints(resolve_field("solubility.primes", intlist, sol.value("primes", json::array({2, 3, 5, 7}))),
                            "params.solubility.primes");
        int t_cap = sol.value("t_cap", 8);
        json verdicts = json::array();
        for (u64 pr : primes) verdicts.push_back(verdict_json(local_solubility(sys, s, pr, t_cap), pr));
        j["solubility"] = {{"s", s}, {"t_cap", t_cap}, {"verdicts", verdicts}};
    }
    return {j, ""};
}

Output run_split(const PolynomialSystem& sys, const json& p) {
    auto sel = select_split(sys, p["C1"].get<long>(), p["C2"].get<long>());
    json minors = json::array();
    for (const auto& m : sel.minors) {
        json cols = json::array();
        for (auto c : m) cols.push_back(c + 1);
        minors.push_back(cols);
    }
    json j = {{"split", split_to_json(sel.split)},
              {"threshold", sel.threshold},
              {"rank_f", rank_report_to_json(sel.rank_f)},
              {"rank_f1g", rank_report_to_json(sel.rank_f1g)},
              {"rank_f2", rank_report_to_json(sel.rank_f2)},
              {"f1", system_to_json(sel.decomposition.f1)},
              {"g", system_to_json(sel.decomposition.g)},
              {"f2", system_to_json(sel.decomposition.f2)},
              {"minors", minors}};
    return {j, ""};
}

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json versions() {
    return {{"cm", kVersion},
            {"gmp", gmp_version},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                  "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) bad("output", "cannot open '" + path + "' for writing");
    f << text;
}

}  // namespace

const std::vector<std::string>& pipelines() {
    static const std::vector<std::string> v = {"count", "compare", "local", "series", "jint",
                                               "arcs-scan", "regularize", "rank", "split"};
    return v;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) bad("config", "expected an object");
    static const std::vector<std::string> keys = {"pipeline", "system", "params", "seed", "output", "csv"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) bad(it.key(), "unknown key");
    ExperimentConfig c;
    if (!j.contains("pipeline") || !j["pipeline"].is_string()) bad("pipeline", "missing or not a string");
    c.pipeline = j["pipeline"].get<std::string>();
    auto sit = schemas().find(c.pipeline);
    if (sit == schemas().end()) bad("pipeline", "unknown pipeline '" + c.pipeline + "'");
    c.system = j.value("system", json(nullptr));
    if (c.pipeline == "arcs-scan") {
        if (!c.system.is_null()) bad("system", "arcs-scan takes no system");
    } else if (!c.system.is_string() && !c.system.is_object()) {
        bad("system", "missing; expected a file path or an inline system object");
    }
    json params = j.value("params", json::object());
    if (!params.is_object()) bad("params", "expected an object");
    const Schema& schema = sit->second;
    for (auto it = params.begin(); it != params.end(); ++it)
        if (!schema.count(it.key())) bad("params." + it.key(), "unknown key for pipeline " + c.pipeline);
    for (const auto& [name, f] : schema) {
        json v = params.contains(name) ? params[name] : f.dflt;
        if (v.is_null()) {
            if (f.optional) {
                c.params[name] = nullptr;
                continue;
            }
            bad("params." + name, "missing");
        }
        c.params[name] = resolve_field(name, f, v);
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) bad("seed", "expected a non-negative integer");
        c.seed = j["seed"].get<u64>();
    }
    for (const char* k : {"output", "csv"})
        if (j.contains(k)) {
            if (!j[k].is_string()) bad(k, "expected a path string");
            (std::string(k) == "output" ? c.output : c.csv) = j[k].get<std::string>();
        }
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j = {{"pipeline", c.pipeline}, {"system", c.system}, {"params", c.params}, {"seed", c.seed}};
    if (!c.output.empty()) j["output"] = c.output;
    if (!c.csv.empty()) j["csv"] = c.csv;
    return j;
}

std::string config_hash(const ExperimentConfig& c) {
    // output locations do not affect results; a system path hashes by content
    json j = {{"pipeline", c.pipeline}, {"params", c.params}, {"seed", c.seed}};
    j["system"] = c.system.is_null() ? json(nullptr) : system_to_json(load_system(c.system));
    std::string text = j.dump();
    u64 h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

json record_to_json(const RunRecord& r) {
    return {{"config_hash", r.config_hash}, {"started", r.started}, {"finished", r.finished},
            {"versions", r.versions},       {"config", r.config},   {"payload", r.payload}};
}

RunRecord run(const ExperimentConfig& given) {
    // round trip through the validator so hand-built configs get the same checks and defaults
    ExperimentConfig c = config_from_json(config_to_json(given));
    RunRecord rec;
    rec.started = utc_now();
    rec.config_hash = config_hash(c);
    rec.versions = versions();
    rec.config = config_to_json(c);
    Output out;
    const json& p = c.params;
    if (c.pipeline == "arcs-scan") {
        out = run_arcs_scan(p);
    } else {
        PolynomialSystem sys = load_system(c.system);
        rec.config["system_resolved"] = system_to_json(sys);
        if (c.pipeline == "count") out = run_count(sys, p);
        else if (c.pipeline == "compare") out = run_compare(sys, p);
        else if (c.pipeline == "local") out = run_local(sys, p);
        else if (c.pipeline == "series") out = run_series(sys, p);
        else if (c.pipeline == "jint") out = run_jint(sys, p);
        else if (c.pipeline == "regularize") out = run_regularize(sys, p);
        else if (c.pipeline == "rank") out = run_rank(sys, p, c.seed);
        else out = run_split(sys, p);
    }
    rec.payload = std::move(out.payload);
    rec.csv = std::move(out.csv);
    rec.finished = utc_now();
    if (!c.output.empty()) write_file(c.output, record_to_json(rec).dump(2) + "\n");
    if (!c.csv.empty()) {
        if (rec.csv.empty()) bad("csv", "pipeline " + c.pipeline + " has no CSV output");
        write_file(c.csv, rec.csv);
    }
    return rec;
}

const std::vector<std::string>& recipe_names() {
    static const std::vector<std::string> v = {"goldbach3", "squares7", "corollary2-demo"};
    return v;
}

ExperimentConfig recipe(const std::string& name) {
    json j;
    if (name == "goldbach3") {
        j = {{"pipeline", "compare"},
             {"system", {{"n", 3}, {"polys", {"x1 + x2 + x3"}}}},
             {"params", {{"s", {30001}}, {"N", 20000}, {"Q", 500}, {"Phi", 64.0}}}};
    } else if (name == "squares7") {
        j = {{"pipeline", "compare"},
             {"system", {{"n", 7}, {"polys", {"x1^2 + x2^2 + x3^2 + x4^2 + x5^2 + x6^2 + x7^2"}}}},
             {"params", {{"s", {78751}}, {"N", 150}, {"Q", 200}, {"Phi", 64.0}}}};
    } else if (name == "corollary2-demo") {
        // indefinite, rank 5; 97 is 1 mod 8 and 1 mod 3 as five unit squares with signature (3, 2) require
        j = {{"pipeline", "rank"},
             {"system", {{"n", 5}, {"polys", {"x1^2 + x2^2 + x3^2 - x4^2 - x5^2"}}}},
             {"params", {{"solubility", {{"s", {97}}, {"primes", {2, 3, 5, 7}}, {"t_cap", 6}}}}}};
    } else {
        bad("recipe", "unknown recipe '" + name + "' (known: goldbach3, squares7, corollary2-demo)");
    }
    j["seed"] = 1;
    return config_from_json(j);
}

}  // namespace cm
