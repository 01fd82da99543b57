#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"

#include "cm/error.hpp"
#include "cm/runner.hpp"

using cm::json;

namespace {

// "1,2,3" -> [1,2,3]; numbers parsed by the JSON reader so integers stay integers
json list_arg(const std::string& flag, const std::string& text) {
    json v;
    try {
        v = json::parse("[" + text + "]");
    } catch (const json::exception&) {
        throw cm::InvalidInput("--" + flag + ": expected comma-separated numbers, got '" + text + "'");
    }
    for (const auto& e : v)
        if (!e.is_number()) throw cm::InvalidInput("--" + flag + ": expected numbers, got '" + text + "'");
    return v;
}

json scalar_arg(const std::string& flag, const std::string& text) {
    json v = list_arg(flag, text);
    if (v.size() != 1) throw cm::InvalidInput("--" + flag + ": expected a single number");
    return v[0];
}

struct Common {
    std::string system, output, csv, format = "json";
    cm::u64 seed = 1;
    std::map<std::string, std::string> raw;  // flag -> text, only flags given
};

struct Sub {
    CLI::App* app;
    std::string pipeline;
    std::shared_ptr<Common> opts;
    std::map<std::string, std::string> kinds;  // flag -> "list" | "scalar" | "string"
};

Sub make_sub(CLI::App& parent, const std::string& name, const std::string& pipeline, const std::string& help,
             bool needs_system) {
    Sub s{parent.add_subcommand(name, help), pipeline, std::make_shared<Common>(), {}};
    if (needs_system) {
        s.app->add_option("--system,--input", s.opts->system, "system JSON file")->required();
    }
    s.app->add_option("--seed", s.opts->seed, "seed recorded in the config");
    s.app->add_option("--output", s.opts->output, "write the run record here");
    s.app->add_option("--csv", s.opts->csv, "write the CSV table here");
    s.app->add_option("--format", s.opts->format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
    return s;
}

void add_param(Sub& s, const std::string& flag, const std::string& kind, const std::string& help) {
    auto opts = s.opts;
    s.app->add_option_function<std::string>("--" + flag, [opts, flag](const std::string& v) { opts->raw[flag] = v; }, help);
    s.kinds[flag] = kind;
}

// flag name -> config parameter name
std::string param_name(const std::string& flag) {
    static const std::map<std::string, std::string> m = {{"phi", "Phi"}, {"phi-min", "Phi_min"}, {"t-cap", "t_cap"}};
    auto it = m.find(flag);
    return it == m.end() ? flag : it->second;
}

cm::ExperimentConfig build(const Sub& s) {
    json j = {{"pipeline", s.pipeline}, {"seed", s.opts->seed}};
    if (!s.opts->system.empty()) j["system"] = s.opts->system;
    json params = json::object();
    for (const auto& [flag, text] : s.opts->raw) {
        const std::string& kind = s.kinds.at(flag);
        if (kind == "list") params[param_name(flag)] = list_arg(flag, text);
        else if (kind == "scalar") params[param_name(flag)] = scalar_arg(flag, text);
        else if (kind == "json-file") params[param_name(flag)] = cm::read_json_file(text);
        else params[param_name(flag)] = text;
    }
    j["params"] = params;
    if (!s.opts->output.empty()) j["output"] = s.opts->output;
    if (!s.opts->csv.empty()) j["csv"] = s.opts->csv;
    return cm::config_from_json(j);
}

int emit(const cm::RunRecord& rec, const std::string& format) {
    if (format == "csv") {
        if (rec.csv.empty()) throw cm::InvalidInput("--format csv: this pipeline has no CSV output");
        std::cout << rec.csv;
    } else {
        std::cout << cm::record_to_json(rec).dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circle-method experiments for systems of integral polynomials"};
    app.require_subcommand(1);

    std::vector<Sub> subs;
    {
        auto s = make_sub(app, "count", "count", "weighted and prime-only point counts", true);
        add_param(s, "s", "list", "target values, comma-separated");
        add_param(s, "N", "scalar", "box size");
        add_param(s, "mode", "string", "weighted | prime_only");
        subs.push_back(s);
    }
    {
        auto s = make_sub(app, "compare", "compare", "count against the predicted main term", true);
        add_param(s, "s", "list", "target values, comma-separated");
        add_param(s, "N", "scalar", "box size");
        add_param(s, "Q", "scalar", "singular series cutoff");
        add_param(s, "phi", "scalar", "singular integral cutoff");
        subs.push_back(s);
    }
    {
        auto s = make_sub(app, "local", "local", "normalized local counts at one prime", true);
        add_param(s, "s", "list", "target values");
        add_param(s, "p", "scalar", "prime");
        add_param(s, "tmax", "scalar", "largest exponent");
        add_param(s, "t-cap", "scalar", "exponent cap for the solubility search");
        subs.push_back(s);
    }
    {
        auto s = make_sub(app, "series", "series", "truncated singular series", true);
        add_param(s, "s", "list", "target values");
        add_param(s, "Q", "scalar", "cutoff");
        subs.push_back(s);
    }
    {
        auto s = make_sub(app, "jint", "jint", "singular integral ladder", true);
        add_param(s, "mu", "list", "point mu, comma-separated");
        add_param(s, "phi", "scalar", "largest cutoff");
        add_param(s, "phi-min", "scalar", "first cutoff of the doubling ladder");
        subs.push_back(s);
    }
    {
        CLI::App* arcs = app.add_subcommand("arcs", "major/minor arc tools");
        arcs->require_subcommand(1);
        auto s = make_sub(*arcs, "scan", "arcs-scan", "minor-arc sup of S_0 over an N ladder", false);
        add_param(s, "C", "scalar", "major arc exponent");
        add_param(s, "d", "scalar", "degree");
        add_param(s, "ladder", "string", "'a:b' for N = 2^a..2^b, or a comma list of N");
        add_param(s, "samples", "scalar", "Sobol points per N");
        subs.push_back(s);
    }
    {
        auto s = make_sub(app, "regularize", "regularize", "regularize a system of degree <= 2", true);
        add_param(s, "F1", "string", "rank target for linear forms");
        add_param(s, "F2", "string", "rank target for quadratics, e.g. const:4");
        add_param(s, "height", "scalar", "lambda lattice height");
        add_param(s, "split", "json-file", "variable split JSON file for the parametric mode");
        subs.push_back(s);
    }
    {
        auto s = make_sub(app, "rank", "rank", "rank reports", true);
        add_param(s, "primes", "list", "primes for the finite-field estimate");
        add_param(s, "box", "scalar", "point budget per prime");
        subs.push_back(s);
    }
    {
        auto s = make_sub(app, "split", "split", "select a variable split", true);
        add_param(s, "C1", "scalar", "threshold slope");
        add_param(s, "C2", "scalar", "threshold offset");
        subs.push_back(s);
    }

    std::string config_path, run_output, run_csv, run_format = "json";
    CLI::App* runc = app.add_subcommand("run", "run a config file");
    runc->add_option("--config", config_path, "config JSON")->required();
    runc->add_option("--output", run_output, "write the run record here");
    runc->add_option("--csv", run_csv, "write the CSV table here");
    runc->add_option("--format", run_format, "stdout format")->check(CLI::IsMember({"json", "csv"}));

    std::string recipe_name;
    bool recipe_run = false;
    CLI::App* rec = app.add_subcommand("recipe", "print or run a pinned config");
    rec->add_option("name", recipe_name, "goldbach3 | squares7 | corollary2-demo")->required();
    rec->add_flag("--run", recipe_run, "run it instead of printing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*runc) {
            auto cfg = cm::config_from_json(cm::read_json_file(config_path));
            if (!run_output.empty()) cfg.output = run_output;
            if (!run_csv.empty()) cfg.csv = run_csv;
            return emit(cm::run(cfg), run_format);
        }
        if (*rec) {
            auto cfg = cm::recipe(recipe_name);
            if (recipe_run) return emit(cm::run(cfg), "json");
            std::cout << cm::config_to_json(cfg).dump(2) << "\n";
            return 0;
        }
        for (const auto& s : subs)
            if (s.app->parsed()) return emit(cm::run(build(s)), s.opts->format);
    } catch (const cm::BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const cm::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
