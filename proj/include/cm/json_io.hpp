#pragma once

#include <string>

#include "json.hpp"

#include "cm/poly.hpp"
#include "cm/rank.hpp"

namespace cm {

using json = nlohmann::json;

// {n, polys:[{terms:[{exps:[...], coef:"..."}]}]}. A member may also be given as a text polynomial.
// Errors name the offending field, e.g. "polys[1].terms[0].coef".
PolynomialSystem system_from_json(const json& j);
json system_to_json(const PolynomialSystem& sys);
json polynomial_to_json(const Polynomial& p);

// Blocks as 1-based index lists {k:[...], y:[...], z:[...]}.
VariableSplit split_from_json(const json& j, std::size_t n);
json split_to_json(const VariableSplit& vs);

json decomposition_to_json(const ProductDecomposition& d);
// {lower, upper, method, witness?}; the infinite sentinel is written as the string "inf".
json rank_report_to_json(const RankReport& r);

json read_json_file(const std::string& path);
PolynomialSystem read_system_file(const std::string& path);

}  // namespace cm
