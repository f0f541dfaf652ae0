#pragma once

#include <array>
#include <optional>
#include <string>

namespace vragent {

// Coordinate space the policy sees images in. Crop coordinates are expressed
// here and mapped to original page pixels by the crop tool.
struct DisplayedSpace {
    int width = 1000;
    int height = 1000;
    bool operator==(const DisplayedSpace&) const = default;
};

// [x1, y1, x2, y2]
using BBox = std::array<int, 4>;

struct Action {
    enum class Kind { Search, Crop, Answer };

    Kind kind = Kind::Search;
    std::string text;  // search query or answer text
    BBox bbox{0, 0, 0, 0};

    static Action search(std::string query);
    static Action crop(const BBox& box);
    static Action answer(std::string text);

    bool operator==(const Action&) const = default;
};

const char* action_kind_name(Action::Kind k);

// Canonical tag syntax accepted back by parse_response.
std::string render_action(const Action& a);

struct AgentResponse {
    std::string think;
    Action action;
    std::string raw_text;  // verbatim model output

    bool operator==(const AgentResponse&) const = default;
};

// Builds a response whose raw_text is the canonical rendering.
AgentResponse make_response(std::string think, Action action);

std::string render_response(const AgentResponse& r);

enum class InvalidReason {
    MissingThink,
    NoActionTag,
    MultipleActions,
    MalformedBbox,
    EmptyPayload,
    TrailingGarbage,
};

const char* invalid_reason_name(InvalidReason r);

// Invalidity is a value, not an error: the loop turns it into an
// InvalidActionNotice observation.
struct ParseOutcome {
    std::optional<AgentResponse> response;
    std::optional<InvalidReason> reason;

    bool valid() const { return response.has_value(); }

    static ParseOutcome ok(AgentResponse r);
    static ParseOutcome invalid(InvalidReason r);
};

// Grammar: optional whitespace, one or more contiguous <think> blocks
// (merged), then exactly one action tag, then optional whitespace.
// Tags are case-sensitive lowercase. Total on arbitrary input.
ParseOutcome parse_response(const std::string& raw, DisplayedSpace space = {});

}  // namespace vragent
