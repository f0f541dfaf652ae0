#include "vragent/action.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace vragent {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

size_t skip_ws(const std::string& s, size_t pos) {
    while (pos < s.size() && is_space(s[pos])) ++pos;
    return pos;
}

bool starts_with_at(const std::string& s, size_t pos, const char* lit) {
    return s.compare(pos, std::string::traits_type::length(lit), lit) == 0;
}

struct TagNames {
    const char* open;
    const char* close;
    Action::Kind kind;
};

constexpr TagNames kTags[] = {
    {"<search>", "</search>", Action::Kind::Search},
    {"<bbox>", "</bbox>", Action::Kind::Crop},
    {"<answer>", "</answer>", Action::Kind::Answer},
};

bool parse_int_token(const std::string& tok, int& out) {
    if (tok.empty()) return false;
    size_t i = tok[0] == '-' ? 1 : 0;
    if (i == tok.size()) return false;
    for (size_t j = i; j < tok.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(tok[j]))) return false;
    }
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) return false;
    if (v < -1000000000LL || v > 1000000000LL) return false;
    out = static_cast<int>(v);
    return true;
}

// Payload: four comma-separated integers, optional spaces, optional
// surrounding brackets. No floats.
bool parse_bbox_payload(const std::string& payload, BBox& out) {
    std::string s = payload;
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') return false;
        s = trim(s.substr(1, s.size() - 2));
    } else if (!s.empty() && s.back() == ']') {
        return false;
    }
    std::vector<std::string> toks;
    size_t start = 0;
    while (true) {
        size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            toks.push_back(trim(s.substr(start)));
            break;
        }
        toks.push_back(trim(s.substr(start, comma - start)));
        start = comma + 1;
    }
    if (toks.size() != 4) return false;
    for (int i = 0; i < 4; ++i) {
        if (!parse_int_token(toks[i], out[i])) return false;
    }
    return true;
}

bool bbox_in_space(const BBox& b, DisplayedSpace space) {
    return b[0] >= 0 && b[1] >= 0 && b[0] < b[2] && b[1] < b[3] &&
           b[2] <= space.width && b[3] <= space.height;
}

}  // namespace

Action Action::search(std::string query) {
    Action a;
    a.kind = Kind::Search;
    a.text = std::move(query);
    return a;
}

Action Action::crop(const BBox& box) {
    Action a;
    a.kind = Kind::Crop;
    a.bbox = box;
    return a;
}

Action Action::answer(std::string text) {
    Action a;
    a.kind = Kind::Answer;
    a.text = std::move(text);
    return a;
}

const char* action_kind_name(Action::Kind k) {
    switch (k) {
        case Action::Kind::Search: return "search";
        case Action::Kind::Crop: return "crop";
        case Action::Kind::Answer: return "answer";
    }
    return "?";
}

std::string render_action(const Action& a) {
    switch (a.kind) {
        case Action::Kind::Search:
            return "<search>" + a.text + "</search>";
        case Action::Kind::Crop:
            return "<bbox>[" + std::to_string(a.bbox[0]) + ", " + std::to_string(a.bbox[1]) +
                   ", " + std::to_string(a.bbox[2]) + ", " + std::to_string(a.bbox[3]) +
                   "]</bbox>";
        case Action::Kind::Answer:
            return "<answer>" + a.text + "</answer>";
    }
    return {};
}

AgentResponse make_response(std::string think, Action action) {
    AgentResponse r;
    r.think = std::move(think);
    r.action = std::move(action);
    r.raw_text = render_response(r);
    return r;
}

std::string render_response(const AgentResponse& r) {
    return "<think>" + r.think + "</think>" + render_action(r.action);
}

const char* invalid_reason_name(InvalidReason r) {
    switch (r) {
        case InvalidReason::MissingThink: return "MissingThink";
        case InvalidReason::NoActionTag: return "NoActionTag";
        case InvalidReason::MultipleActions: return "MultipleActions";
        case InvalidReason::MalformedBbox: return "MalformedBbox";
        case InvalidReason::EmptyPayload: return "EmptyPayload";
        case InvalidReason::TrailingGarbage: return "TrailingGarbage";
    }
    return "?";
}

ParseOutcome ParseOutcome::ok(AgentResponse r) {
    ParseOutcome o;
    o.response = std::move(r);
    return o;
}

ParseOutcome ParseOutcome::invalid(InvalidReason r) {
    ParseOutcome o;
    o.reason = r;
    return o;
}

ParseOutcome parse_response(const std::string& raw, DisplayedSpace space) {
    size_t pos = skip_ws(raw, 0);

    // One or more contiguous think blocks, merged in order.
    std::string think;
    bool saw_think = false;
    while (pos < raw.size() && starts_with_at(raw, pos, "<think>")) {
        size_t body = pos + 7;
        size_t close = raw.find("</think>", body);
        if (close == std::string::npos) {
            return ParseOutcome::invalid(InvalidReason::MissingThink);
        }
        if (saw_think) think += "\n";
        think += raw.substr(body, close - body);
        saw_think = true;
        pos = skip_ws(raw, close + 8);
    }
    if (!saw_think || trim(think).empty()) {
        return ParseOutcome::invalid(InvalidReason::MissingThink);
    }

    // Remainder must be exactly one action tag. Count opens over the whole
    // remainder so duplicated tags anywhere trip MultipleActions.
    const std::string rest = raw.substr(pos);
    size_t open_count = 0;
    size_t first_open = std::string::npos;
    const TagNames* tag = nullptr;
    for (const auto& t : kTags) {
        size_t from = 0;
        while (true) {
            size_t at = rest.find(t.open, from);
            if (at == std::string::npos) break;
            ++open_count;
            if (at < first_open) {
                first_open = at;
                tag = &t;
            }
            from = at + 1;
        }
    }
    if (open_count == 0) {
        return ParseOutcome::invalid(InvalidReason::NoActionTag);
    }
    if (open_count > 1) {
        return ParseOutcome::invalid(InvalidReason::MultipleActions);
    }
    if (first_open != 0) {
        // Non-whitespace between think and the action tag.
        return ParseOutcome::invalid(InvalidReason::TrailingGarbage);
    }
    size_t body = first_open + std::string::traits_type::length(tag->open);
    size_t close = rest.find(tag->close, body);
    if (close == std::string::npos) {
        return ParseOutcome::invalid(InvalidReason::NoActionTag);
    }
    size_t after = close + std::string::traits_type::length(tag->close);
    if (skip_ws(rest, after) != rest.size()) {
        return ParseOutcome::invalid(InvalidReason::TrailingGarbage);
    }

    const std::string payload = trim(rest.substr(body, close - body));
    if (payload.empty()) {
        return ParseOutcome::invalid(InvalidReason::EmptyPayload);
    }

    Action action;
    switch (tag->kind) {
        case Action::Kind::Search:
            action = Action::search(payload);
            break;
        case Action::Kind::Answer:
            action = Action::answer(payload);
            break;
        case Action::Kind::Crop: {
            BBox box{};
            if (!parse_bbox_payload(payload, box) || !bbox_in_space(box, space)) {
                return ParseOutcome::invalid(InvalidReason::MalformedBbox);
            }
            action = Action::crop(box);
            break;
        }
    }

    AgentResponse resp;
    resp.think = think;
    resp.action = std::move(action);
    resp.raw_text = raw;
    return ParseOutcome::ok(std::move(resp));
}

}  // namespace vragent
