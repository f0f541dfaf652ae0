#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "vragent/action.hpp"

namespace vragent {

struct Query {
    std::string id;
    std::string text;
    std::optional<std::string> reference_answer;
    std::vector<std::string> reference_pages;  // empty = no ground truth

    bool operator==(const Query&) const = default;
};

struct PageRef {
    std::string page_id;  // corpus filename stem
    int width_px = 0;
    int height_px = 0;

    bool operator==(const PageRef&) const = default;
};

enum class ObservationKind {
    RetrievedPage,
    CropResult,
    NoNewPages,
    InvalidActionNotice,
    ForcedAnswerRequest,
};

const char* observation_kind_name(ObservationKind k);
std::optional<ObservationKind> observation_kind_from_name(const std::string& s);

// Environment feedback after an action. Images are referenced by page +
// crop box, never inlined.
struct Observation {
    ObservationKind kind = ObservationKind::RetrievedPage;
    std::optional<PageRef> page;                  // RetrievedPage, CropResult
    std::optional<std::array<int, 4>> crop_box;   // CropResult; original-image pixels
    std::string prompt_text;                      // rendered, intent-injected

    bool operator==(const Observation&) const = default;
};

// A rejected generation attempt. Retries happen within one turn, so these
// ride along on the turn that eventually committed (or on the forced-answer
// turn when retries ran out).
struct InvalidAttempt {
    std::string raw_text;
    std::string reason;  // parse reason name or loop-level code (e.g. crop_not_allowed)

    bool operator==(const InvalidAttempt&) const = default;
};

struct Turn {
    int index = 0;  // 1-based, strictly increasing
    AgentResponse response;
    std::optional<Observation> observation;  // absent only on the terminal answer turn
    std::vector<InvalidAttempt> invalid_attempts;

    bool operator==(const Turn&) const = default;
};

enum class EvidencePhase { PreCrop, PostCrop };

struct EvidenceEntry {
    std::string page_id;
    std::string pre;
    std::optional<std::string> post;

    bool operator==(const EvidenceEntry&) const = default;
};

// Per-page ledger of distilled findings, insertion-ordered.
class EvidenceSpace {
public:
    const std::vector<EvidenceEntry>& entries() const { return entries_; }
    bool contains(const std::string& page_id) const;
    const EvidenceEntry* find(const std::string& page_id) const;
    bool empty() const { return entries_.empty(); }
    size_t size() const { return entries_.size(); }

    // PreCrop inserts a new entry; a pre entry is never amended on revisit.
    // PostCrop requires an existing pre entry and overwrites post (latest
    // crop wins). `max_chars` 0 = unlimited.
    void update(const std::string& page_id, const std::string& think, EvidencePhase phase,
                size_t max_chars = 0);

    bool operator==(const EvidenceSpace&) const = default;

private:
    std::vector<EvidenceEntry> entries_;
};

EvidenceSpace update_evidence(EvidenceSpace evidence, const std::string& page_id,
                              const std::string& think, EvidencePhase phase,
                              size_t max_chars = 0);

enum class TrajectoryStatus { Running, Answered, ForcedAnswered, Exhausted };

const char* trajectory_status_name(TrajectoryStatus s);
std::optional<TrajectoryStatus> trajectory_status_from_name(const std::string& s);

struct Trajectory {
    Query query;
    std::vector<Turn> turns;
    EvidenceSpace evidence;
    std::vector<std::string> retrieved_page_ids;  // search history, duplicate-free
    TrajectoryStatus status = TrajectoryStatus::Running;
    std::optional<std::string> final_answer;

    bool has_retrieved(const std::string& page_id) const;
    const Turn* last_turn() const { return turns.empty() ? nullptr : &turns.back(); }

    bool operator==(const Trajectory&) const = default;
};

// Appends a turn, maintaining search history and terminal transitions.
// A Search turn whose observation is RetrievedPage extends
// retrieved_page_ids; an Answer turn ends the trajectory (ForcedAnswered
// when `forced`). Throws AppendAfterTerminal if not Running.
void append_turn(Trajectory& traj, Turn turn, bool forced = false);

// Rebuilds a trajectory by replaying append_turn and the evidence update
// rule over logged turns. Replaying a logged trajectory must reproduce its
// terminal state exactly.
Trajectory replay_trajectory(const Query& query, const std::vector<Turn>& turns,
                             TrajectoryStatus final_status, size_t evidence_max_chars = 0);

// JSON log format. Top-level field names are fixed:
// query, turns, evidence, retrieved_page_ids, status, final_answer.
nlohmann::json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Query& q);
Query query_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Turn& t);
Turn turn_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Observation& o);
Observation observation_from_json(const nlohmann::json& j);

}  // namespace vragent
