#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vragent/templates.hpp"
#include "vragent/trajectory.hpp"

namespace vragent {

// Reference to page pixels; the transport layer resolves it to bytes.
// crop_box (original-image pixels) present means "the cropped view".
struct ImageRef {
    PageRef page;
    std::optional<std::array<int, 4>> crop_box;

    bool operator==(const ImageRef&) const = default;
};

struct Message {
    std::string role;  // system | user | assistant
    std::string text;
    std::optional<ImageRef> image;

    bool operator==(const Message&) const = default;
};

// Model input for one generation: pinned prefix (system, question, evidence
// block) plus the last W raw turns. Only recent turns may carry images, so
// the in-context image count is bounded by W regardless of trajectory
// length. `trailing` holds within-turn exchanges that are not part of the
// committed history (invalid-action retries, the forced-answer request).
struct ContextWindow {
    std::vector<Message> pinned;
    std::vector<std::pair<AgentResponse, Observation>> recent_turns;
    int window = 0;
    std::vector<Message> trailing;

    size_t image_count() const;
    // Flat message list in transport order.
    std::vector<Message> to_messages() const;
};

// Fixed deterministic layout for the pinned evidence block.
std::string render_evidence_block(const EvidenceSpace& evidence);

ContextWindow build_context(const Trajectory& traj, const PromptTemplateSet& templates, int window);

struct ObservationPromptExtra {
    std::string reason;       // InvalidActionNotice
    std::optional<int> turn;  // available to templates using {turn}
    bool verification = false;  // RetrievedPage: append the verification hint
};

std::string render_observation_prompt(ObservationKind kind, const Query& query,
                                      const EvidenceSpace& evidence,
                                      const PromptTemplateSet& templates,
                                      const ObservationPromptExtra& extra = {});

std::string render_verification_hint(const Query& query, const PromptTemplateSet& templates);

}  // namespace vragent
