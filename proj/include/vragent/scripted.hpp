#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "vragent/loop.hpp"

namespace vragent {

// Canned policy for offline runs and golden tests. A script is a JSON list
// of responses keyed by generation index (1-based count of generate calls
// within one trajectory), each optionally gated on a substring of the most
// recent user message:
//
//   {"responses": [
//      {"turn": 1, "text": "<think>...</think><search>...</search>"},
//      {"turn": 2, "when_contains": "no new pages", "text": "..."},
//      {"turn": 2, "text": "..."}
//   ]}
//
// The first entry whose turn matches and whose pattern (if any) occurs in
// the observed prompt wins. Running out of script raises PolicyFailure.
class ScriptedPolicy final : public PolicyPort {
public:
    explicit ScriptedPolicy(nlohmann::json script);

    std::string generate(const ContextWindow& context) override;

private:
    nlohmann::json script_;
    int calls_ = 0;
};

// A script file holding one script per query id:
//   {"queries": {"q1": {"responses": [...]}, ...}}
// or a single flat script applied to every query.
class ScriptedPolicyBook {
public:
    static ScriptedPolicyBook load(const std::string& path);
    explicit ScriptedPolicyBook(nlohmann::json root);

    std::unique_ptr<PolicyPort> make(const Query& query) const;

private:
    nlohmann::json root_;
};

}  // namespace vragent
