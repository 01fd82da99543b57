#pragma once

#include <string>
#include <vector>

#include "cm/json_io.hpp"

namespace cm {

inline constexpr const char* kVersion = "0.1.0";
// Directory for cached sieve tables; unset or empty disables the cache.
inline constexpr const char* kSieveCacheEnv = "CM_SIEVE_CACHE";

struct ExperimentConfig {
    std::string pipeline;  // count | compare | local | series | jint | arcs-scan | regularize | rank | split
    json system;           // path string, inline system object, or null (arcs-scan)
    json params = json::object();
    u64 seed = 1;
    std::string output;    // record JSON path, optional
    std::string csv;       // CSV path, optional
};

const std::vector<std::string>& pipelines();

// Rejects unknown keys at both levels, checks types, and fills parameter defaults.
ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);
// 16 hex digits of FNV-1a over the canonical dump of the resolved config.
std::string config_hash(const ExperimentConfig& c);

struct RunRecord {
    std::string config_hash;
    std::string started, finished;  // UTC, ISO 8601
    json versions;
    json config;
    json payload;       // deterministic given the config
    std::string csv;    // may be empty
};

json record_to_json(const RunRecord& r);

// Validates, dispatches, and writes output/csv when the config names them.
RunRecord run(const ExperimentConfig& config);

// Pinned configurations: goldbach3, squares7, corollary2-demo.
ExperimentConfig recipe(const std::string& name);
const std::vector<std::string>& recipe_names();

}  // namespace cm
