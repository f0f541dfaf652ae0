#include "vragent/scripted.hpp"

#include <fstream>

#include "vragent/error.hpp"

namespace vragent {

ScriptedPolicy::ScriptedPolicy(nlohmann::json script) : script_(std::move(script)) {
    if (!script_.contains("responses") || !script_["responses"].is_array()) {
        raise(Errc::ConfigError, "script has no 'responses' array");
    }
}

std::string ScriptedPolicy::generate(const ContextWindow& context) {
    ++calls_;
    std::string observed;
    const auto messages = context.to_messages();
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == "user") {
            observed = it->text;
            break;
        }
    }
    for (const auto& entry : script_["responses"]) {
        if (entry.value("turn", -1) != calls_) continue;
        const std::string pattern = entry.value("when_contains", std::string());
        if (!pattern.empty() && observed.find(pattern) == std::string::npos) continue;
        return entry.at("text").get<std::string>();
    }
    if (script_.contains("default")) {
        return script_["default"].get<std::string>();
    }
    raise(Errc::PolicyFailure, "script exhausted at generation " + std::to_string(calls_));
}

ScriptedPolicyBook ScriptedPolicyBook::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot open script '" + path + "'");
    nlohmann::json root;
    try {
        in >> root;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::ConfigError, "script '" + path + "': " + e.what());
    }
    return ScriptedPolicyBook(std::move(root));
}

ScriptedPolicyBook::ScriptedPolicyBook(nlohmann::json root) : root_(std::move(root)) {}

std::unique_ptr<PolicyPort> ScriptedPolicyBook::make(const Query& query) const {
    if (root_.contains("queries")) {
        const auto& q = root_["queries"];
        if (!q.contains(query.id)) {
            raise(Errc::ConfigError, "no script for query '" + query.id + "'");
        }
        return std::make_unique<ScriptedPolicy>(q.at(query.id));
    }
    return std::make_unique<ScriptedPolicy>(root_);
}

}  // namespace vragent
