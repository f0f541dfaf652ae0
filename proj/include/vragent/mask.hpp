#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vragent {

// One tagged piece of an uncompressed trajectory transcript. Lengths are in
// abstract token units supplied by the caller's tokenizer; the engine never
// tokenizes.
struct TranscriptSegment {
    enum class Role { System, User, Agent, Observation };
    Role role = Role::System;
    int64_t length = 0;
};

TranscriptSegment::Role segment_role_from_name(const std::string& s);
const char* segment_role_name(TranscriptSegment::Role r);

struct MaskSpan {
    int64_t start = 0;  // inclusive
    int64_t end = 0;    // exclusive
    enum class Kind { AgentGenerated, Observation } kind = Kind::Observation;

    bool operator==(const MaskSpan&) const = default;
};

const char* mask_kind_name(MaskSpan::Kind k);

// Sorted, disjoint spans covering [0, total) exactly. Agent segments map to
// AgentGenerated (the only tokens that carry gradient); everything else is
// Observation. Adjacent same-kind spans are merged.
std::vector<MaskSpan> rl_mask_spans(const std::vector<TranscriptSegment>& transcript);

}  // namespace vragent
