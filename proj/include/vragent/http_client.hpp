#pragma once

#include <optional>
#include <string>

#include "vragent/loop.hpp"
#include "vragent/reward.hpp"

namespace vragent {

struct HttpEndpoint {
    std::string base_url;  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key;       // resolved from env by config loading
    double temperature = 0.0;
    int timeout_s = 120;
    int max_attempts = 3;      // total tries, exponential backoff between
    int backoff_ms = 250;
};

// Bridges the loop to any chat-completions-shaped VLM endpoint. Pinned and
// recent-turn messages map 1:1 onto the request; observation images are
// resolved from the corpus (cropping on the fly for crop views) and
// attached as base64 data URLs. At most W images appear per request by
// construction.
class HttpPolicy final : public PolicyPort {
public:
    HttpPolicy(HttpEndpoint endpoint, const CorpusManifest* corpus, ToolConfig tools);

    std::string generate(const ContextWindow& context) override;

    // Exposed for payload-inspection tests.
    nlohmann::json build_request(const ContextWindow& context) const;

private:
    HttpEndpoint endpoint_;
    const CorpusManifest* corpus_;
    ToolConfig tools_;
};

struct HttpJudgeConfig {
    HttpEndpoint endpoint;
    // {question} {reference} {prediction} placeholders; the judge must
    // reply with a bare 0 or 1.
    std::string correctness_prompt;
    // {prediction} only; 1 = explicitly acknowledges insufficiency.
    std::string honesty_prompt;

    static std::string default_correctness_prompt();
    static std::string default_honesty_prompt();
};

class HttpJudge final : public JudgePort {
public:
    explicit HttpJudge(HttpJudgeConfig config);

    int correctness(const std::string& question, const std::string& reference,
                    const std::string& prediction) override;
    double honesty(const std::string& prediction) override;

private:
    int ask_binary(const std::string& prompt);

    HttpJudgeConfig config_;
};

std::string base64_encode(const unsigned char* data, size_t len);

// POSTs a chat completion and returns choices[0].message.content. Throws
// PolicyFailure after max_attempts tries (timeouts, transport errors,
// non-2xx statuses) or on a malformed response body.
std::string chat_completion(const HttpEndpoint& endpoint, const nlohmann::json& messages);

}  // namespace vragent
