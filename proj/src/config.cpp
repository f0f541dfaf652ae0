#include "vragent/config.hpp"

#include <cstdlib>
#include <fstream>

#include "vragent/error.hpp"
#include "vragent/http_client.hpp"
#include "vragent/scripted.hpp"

namespace vragent {

std::string interpolate_env(const std::string& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') {
            size_t close = s.find('}', i + 2);
            if (close == std::string::npos) {
                raise(Errc::ConfigError, "unterminated ${ in '" + s + "'");
            }
            const std::string name = s.substr(i + 2, close - i - 2);
            const char* val = std::getenv(name.c_str());
            if (!val) raise(Errc::ConfigError, "environment variable '" + name + "' is unset");
            out += val;
            i = close;
        } else {
            out += s[i];
        }
    }
    return out;
}

nlohmann::json interpolate_env_json(nlohmann::json j) {
    if (j.is_string()) return interpolate_env(j.get<std::string>());
    if (j.is_object()) {
        for (auto& [k, v] : j.items()) v = interpolate_env_json(v);
    } else if (j.is_array()) {
        for (auto& v : j) v = interpolate_env_json(v);
    }
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& raw) {
    const nlohmann::json j = interpolate_env_json(raw);
    RunConfig c;
    c.index_path = j.value("index", std::string());
    c.corpus_path = j.value("corpus", std::string());
    c.eval_path = j.value("eval", std::string());
    c.template_dir = j.value("template_dir", std::string());
    c.template_set = j.value("template_set", std::string("default"));
    c.output_dir = j.value("output_dir", std::string("out"));

    c.loop.max_turns = j.value("max_turns", 10);
    c.loop.window_size = j.value("window_size", 2);
    c.loop.top_k = j.value("top_k", 10);
    c.loop.invalid_retry_limit = j.value("invalid_retry_limit", 2);
    c.loop.evidence_max_chars = j.value("evidence_max_chars", 0);
    if (j.contains("verification_markers")) {
        c.loop.verification_markers =
            j.at("verification_markers").get<std::vector<std::string>>();
    }

    if (j.contains("displayed_space")) {
        auto ds = j.at("displayed_space").get<std::array<int, 2>>();
        c.tools.displayed_space = {ds[0], ds[1]};
    }
    c.tools.margin_px = j.value("margin_px", 28);
    if (j.contains("crop_output")) {
        auto os = j.at("crop_output").get<std::array<int, 2>>();
        c.tools.crop_output = {os[0], os[1]};
    }

    if (j.contains("embedder")) {
        const auto& e = j.at("embedder");
        c.embedder = e.value("kind", std::string("hashing"));
        c.embed_dim = e.value("dim", 64);
    }
    c.policy = j.value("policy", nlohmann::json());
    c.judge = j.value("judge", nlohmann::json());
    c.seed = j.value("seed", 0ULL);
    c.parallelism = j.value("parallelism", 1);
    c.trace = j.value("trace", false);

    if (c.loop.max_turns < 1) raise(Errc::ConfigError, "max_turns must be >= 1");
    if (c.loop.window_size < 1 || c.loop.window_size > 8) {
        raise(Errc::ConfigError, "window_size must be in [1, 8]");
    }
    if (c.loop.top_k < 1) raise(Errc::ConfigError, "top_k must be >= 1");
    if (c.template_set != "default" && c.template_set != "small") {
        raise(Errc::ConfigError, "template_set must be 'default' or 'small'");
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ConfigError, "config '" + path + "': " + e.what());
    }
    return from_json(j);
}

PromptTemplateSet resolve_templates(const RunConfig& cfg) {
    if (!cfg.template_dir.empty()) {
        return PromptTemplateSet::load_dir(cfg.template_dir);
    }
    return cfg.template_set == "small" ? PromptTemplateSet::builtin_small()
                                       : PromptTemplateSet::builtin_default();
}

namespace {

HttpEndpoint endpoint_from_json(const nlohmann::json& spec) {
    HttpEndpoint ep;
    ep.base_url = spec.at("base_url").get<std::string>();
    ep.path = spec.value("path", std::string("/v1/chat/completions"));
    ep.model = spec.value("model", std::string());
    ep.temperature = spec.value("temperature", 0.0);
    ep.timeout_s = spec.value("timeout_s", 120);
    ep.max_attempts = spec.value("max_attempts", 3);
    ep.backoff_ms = spec.value("backoff_ms", 250);
    if (spec.contains("api_key_env")) {
        const std::string var = spec.at("api_key_env").get<std::string>();
        const char* val = std::getenv(var.c_str());
        if (!val) raise(Errc::ConfigError, "api key variable '" + var + "' is unset");
        ep.api_key = val;
    } else {
        ep.api_key = spec.value("api_key", std::string());
    }
    return ep;
}

}  // namespace

std::unique_ptr<JudgePort> make_judge(const nlohmann::json& spec) {
    if (spec.is_null() || spec.empty()) return nullptr;
    const std::string kind = spec.value("kind", std::string());
    if (kind == "scripted") {
        auto phrases = ScriptedJudge::default_honesty_phrases();
        if (spec.contains("honesty_phrases")) {
            phrases = spec.at("honesty_phrases").get<std::vector<std::string>>();
        }
        return std::make_unique<ScriptedJudge>(std::move(phrases));
    }
    if (kind == "http") {
        HttpJudgeConfig jc;
        jc.endpoint = endpoint_from_json(spec);
        jc.correctness_prompt = spec.value("correctness_prompt", std::string());
        jc.honesty_prompt = spec.value("honesty_prompt", std::string());
        return std::make_unique<HttpJudge>(std::move(jc));
    }
    raise(Errc::ConfigError, "unknown judge kind '" + kind + "'");
}

PolicyFactory make_policy_factory(const nlohmann::json& spec, const CorpusManifest* corpus,
                                  const ToolConfig& tools) {
    if (spec.is_null() || spec.empty()) {
        raise(Errc::ConfigError, "policy backend is required");
    }
    const std::string kind = spec.value("kind", std::string());
    if (kind == "scripted") {
        auto book = std::make_shared<ScriptedPolicyBook>(
            ScriptedPolicyBook::load(spec.at("script").get<std::string>()));
        return [book](const Query& q, uint64_t) { return book->make(q); };
    }
    if (kind == "http") {
        HttpEndpoint ep = endpoint_from_json(spec);
        return [ep, corpus, tools](const Query&, uint64_t) {
            return std::make_unique<HttpPolicy>(ep, corpus, tools);
        };
    }
    raise(Errc::ConfigError, "unknown policy kind '" + kind + "'");
}

}  // namespace vragent
