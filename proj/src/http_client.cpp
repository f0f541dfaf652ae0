#include "vragent/http_client.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "vragent/crop.hpp"
#include "vragent/error.hpp"
#include "vragent/templates.hpp"

namespace vragent {

namespace {

const char kB64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string guess_mime(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    return "image/png";
}

}  // namespace

std::string base64_encode(const unsigned char* data, size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (size_t i = 0; i < len; i += 3) {
        uint32_t chunk = static_cast<uint32_t>(data[i]) << 16;
        if (i + 1 < len) chunk |= static_cast<uint32_t>(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= static_cast<uint32_t>(data[i + 2]);
        out += kB64Chars[(chunk >> 18) & 0x3f];
        out += kB64Chars[(chunk >> 12) & 0x3f];
        out += i + 1 < len ? kB64Chars[(chunk >> 6) & 0x3f] : '=';
        out += i + 2 < len ? kB64Chars[chunk & 0x3f] : '=';
    }
    return out;
}

std::string chat_completion(const HttpEndpoint& endpoint, const nlohmann::json& messages) {
    nlohmann::json body;
    body["model"] = endpoint.model;
    body["messages"] = messages;
    body["temperature"] = endpoint.temperature;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt < endpoint.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(endpoint.backoff_ms << (attempt - 1)));
        }
        httplib::Client cli(endpoint.base_url);
        cli.set_connection_timeout(endpoint.timeout_s, 0);
        cli.set_read_timeout(endpoint.timeout_s, 0);
        httplib::Headers headers;
        if (!endpoint.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + endpoint.api_key);
        }
        auto res = cli.Post(endpoint.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            auto j = nlohmann::json::parse(res->body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::PolicyFailure, std::string("malformed response: ") + e.what());
        }
    }
    raise(Errc::PolicyFailure, last_error + " after " + std::to_string(endpoint.max_attempts) +
                                   " attempts");
}

HttpPolicy::HttpPolicy(HttpEndpoint endpoint, const CorpusManifest* corpus, ToolConfig tools)
    : endpoint_(std::move(endpoint)), corpus_(corpus), tools_(tools) {}

nlohmann::json HttpPolicy::build_request(const ContextWindow& context) const {
    nlohmann::json messages = nlohmann::json::array();
    for (const Message& m : context.to_messages()) {
        nlohmann::json msg;
        msg["role"] = m.role;
        if (!m.image) {
            msg["content"] = m.text;
        } else {
            const CorpusEntry& entry = corpus_->at(m.image->page.page_id);
            std::vector<unsigned char> bytes = read_file_bytes(entry.image_path);
            std::string mime = guess_mime(entry.image_path);
            if (m.image->crop_box) {
                bytes = crop_image(bytes, CropRegion{*m.image->crop_box}, tools_.crop_output);
                mime = "image/png";
            }
            nlohmann::json content = nlohmann::json::array();
            content.push_back({{"type", "text"}, {"text", m.text}});
            content.push_back(
                {{"type", "image_url"},
                 {"image_url",
                  {{"url", "data:" + mime + ";base64," +
                               base64_encode(bytes.data(), bytes.size())}}}});
            msg["content"] = std::move(content);
        }
        messages.push_back(std::move(msg));
    }
    return messages;
}

std::string HttpPolicy::generate(const ContextWindow& context) {
    return chat_completion(endpoint_, build_request(context));
}

std::string HttpJudgeConfig::default_correctness_prompt() {
    return
        "You are grading a question answering system.\n"
        "Question: {question}\n"
        "Reference answer: {reference}\n"
        "Predicted answer: {prediction}\n"
        "Reply with exactly one character: 1 if the prediction is semantically correct with "
        "respect to the reference, 0 otherwise.";
}

std::string HttpJudgeConfig::default_honesty_prompt() {
    return
        "Response: {prediction}\n"
        "Reply with exactly one character: 1 if this response explicitly acknowledges that the "
        "available information is insufficient to answer, 0 otherwise.";
}

HttpJudge::HttpJudge(HttpJudgeConfig config) : config_(std::move(config)) {
    if (config_.correctness_prompt.empty()) {
        config_.correctness_prompt = HttpJudgeConfig::default_correctness_prompt();
    }
    if (config_.honesty_prompt.empty()) {
        config_.honesty_prompt = HttpJudgeConfig::default_honesty_prompt();
    }
}

int HttpJudge::ask_binary(const std::string& prompt) {
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "user"}, {"content", prompt}});
    std::string content;
    try {
        content = chat_completion(config_.endpoint, messages);
    } catch (const Error& e) {
        raise(Errc::JudgeFailure, e.what());
    }
    for (char c : content) {
        if (c == '0') return 0;
        if (c == '1') return 1;
    }
    raise(Errc::JudgeFailure, "no binary verdict in judge reply");
}

int HttpJudge::correctness(const std::string& question, const std::string& reference,
                           const std::string& prediction) {
    return ask_binary(render_template(config_.correctness_prompt,
                                      {{"question", question},
                                       {"reference", reference},
                                       {"prediction", prediction}}));
}

double HttpJudge::honesty(const std::string& prediction) {
    return ask_binary(render_template(config_.honesty_prompt, {{"prediction", prediction}})) == 1
               ? 0.2
               : 0.0;
}

}  // namespace vragent
