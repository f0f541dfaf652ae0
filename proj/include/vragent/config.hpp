#pragma once

#include <memory>
#include <nlohmann/json.hpp>
#include <string>

#include "vragent/loop.hpp"
#include "vragent/reward.hpp"
#include "vragent/runner.hpp"

namespace vragent {

// Run configuration file: JSON with ${VAR} environment interpolation inside
// string values. CLI flags override file values.
struct RunConfig {
    std::string index_path;
    std::string corpus_path;
    std::string eval_path;
    std::string template_dir;            // empty = built-ins
    std::string template_set = "default";  // default | small
    std::string output_dir = "out";

    LoopConfig loop;
    ToolConfig tools;

    std::string embedder = "hashing";
    size_t embed_dim = 64;

    nlohmann::json policy;  // {"kind":"scripted","script":...} | {"kind":"http",...}
    nlohmann::json judge;   // {"kind":"scripted"} | {"kind":"http",...} | null

    uint64_t seed = 0;
    int parallelism = 1;
    bool trace = false;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::string& path);
};

// Replaces ${NAME} with the environment value; unset variables are a
// ConfigError.
std::string interpolate_env(const std::string& s);
nlohmann::json interpolate_env_json(nlohmann::json j);

PromptTemplateSet resolve_templates(const RunConfig& cfg);

// nullptr when spec is null/absent (metrics-only runs).
std::unique_ptr<JudgePort> make_judge(const nlohmann::json& spec);

PolicyFactory make_policy_factory(const nlohmann::json& spec, const CorpusManifest* corpus,
                                  const ToolConfig& tools);

}  // namespace vragent
