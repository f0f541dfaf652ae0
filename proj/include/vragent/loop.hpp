#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vragent/context.hpp"
#include "vragent/corpus.hpp"
#include "vragent/crop.hpp"
#include "vragent/embedder.hpp"
#include "vragent/index.hpp"
#include "vragent/templates.hpp"
#include "vragent/trajectory.hpp"

namespace vragent {

struct LoopConfig {
    int max_turns = 10;
    int window_size = 2;
    int top_k = 10;  // dedup scan depth
    std::vector<std::string> verification_markers = {"verify", "confirm", "double-check"};
    int invalid_retry_limit = 2;  // per-turn; exceeded -> forced answer
    size_t evidence_max_chars = 0;
};

struct ToolConfig {
    DisplayedSpace displayed_space{};
    int margin_px = 28;
    OutputSize crop_output{};
};

// Shared read-only state for a run: index, embedder, corpus metadata,
// templates, tool parameters. Safe to share across concurrent trajectories.
struct Environment {
    const RetrievalIndex* index = nullptr;
    const TextEmbedder* embedder = nullptr;
    const CorpusManifest* corpus = nullptr;
    const PromptTemplateSet* templates = nullptr;
    ToolConfig tools;
};

// Abstraction over the policy model. One port instance drives one
// trajectory; implementations must be deterministic for a given context
// when seeded (exact for scripted ports, best-effort for HTTP).
class PolicyPort {
public:
    virtual ~PolicyPort() = default;
    virtual std::string generate(const ContextWindow& context) = 0;
};

using PolicyFactory = std::function<std::unique_ptr<PolicyPort>(const Query&, uint64_t seed)>;

struct LoopEvent {
    int turn = 0;
    std::string kind;  // searched|cropped|invalid_action|verification_hinted|forced_answer|answered
    nlohmann::json detail;
    int64_t timestamp_ms = 0;
};

struct LoopResult {
    Trajectory trajectory;
    std::vector<LoopEvent> events;
    std::optional<std::string> failure;  // set when the policy backend gave out
};

// true iff any configured marker occurs case-insensitively in the think
// preceding a search. An empty marker list disables the feature.
bool detect_verification(const std::string& think, const LoopConfig& cfg);

struct StepResult {
    std::optional<Observation> observation;  // none only for a committed answer
    bool committed = false;                  // a turn was appended to the trajectory
    std::optional<std::string> invalid_code; // set when the action was rejected
};

// Applies one parsed policy output to the trajectory: updates evidence from
// the think, executes the action, and appends the committed turn. Rejected
// outputs (parse-invalid, or a crop that does not immediately follow a
// retrieved page) commit nothing and yield an InvalidActionNotice
// observation for the retry exchange.
StepResult step(Trajectory& traj, const ParseOutcome& parsed, const Environment& env,
                const LoopConfig& cfg, bool verification);

// Runs the full loop: generate, parse, step; invalid outputs are retried
// within the turn up to invalid_retry_limit; when the turn budget or retry
// budget is exhausted, one forced-answer generation closes the trajectory.
// Policy transport failures mark the trajectory Exhausted and preserve the
// partial log.
LoopResult run_trajectory(const Query& query, const Environment& env, PolicyPort& policy,
                          const LoopConfig& cfg);

}  // namespace vragent
