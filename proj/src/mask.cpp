#include "vragent/mask.hpp"

#include "vragent/error.hpp"

namespace vragent {

TranscriptSegment::Role segment_role_from_name(const std::string& s) {
    if (s == "system") return TranscriptSegment::Role::System;
    if (s == "user") return TranscriptSegment::Role::User;
    if (s == "agent") return TranscriptSegment::Role::Agent;
    if (s == "observation") return TranscriptSegment::Role::Observation;
    raise(Errc::BadInput, "unknown segment role '" + s + "'");
}

const char* segment_role_name(TranscriptSegment::Role r) {
    switch (r) {
        case TranscriptSegment::Role::System: return "system";
        case TranscriptSegment::Role::User: return "user";
        case TranscriptSegment::Role::Agent: return "agent";
        case TranscriptSegment::Role::Observation: return "observation";
    }
    return "?";
}

const char* mask_kind_name(MaskSpan::Kind k) {
    return k == MaskSpan::Kind::AgentGenerated ? "agent_generated" : "observation";
}

std::vector<MaskSpan> rl_mask_spans(const std::vector<TranscriptSegment>& transcript) {
    if (transcript.empty()) {
        raise(Errc::EmptyTranscript, "transcript has no segments");
    }
    std::vector<MaskSpan> spans;
    int64_t offset = 0;
    for (const auto& seg : transcript) {
        if (seg.length <= 0) {
            raise(Errc::BadInput, "segment length must be positive");
        }
        const auto kind = seg.role == TranscriptSegment::Role::Agent
                              ? MaskSpan::Kind::AgentGenerated
                              : MaskSpan::Kind::Observation;
        if (!spans.empty() && spans.back().kind == kind) {
            spans.back().end += seg.length;
        } else {
            spans.push_back({offset, offset + seg.length, kind});
        }
        offset += seg.length;
    }
    return spans;
}

}  // namespace vragent
