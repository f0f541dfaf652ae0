#include "vragent/trajectory.hpp"

#include <algorithm>

#include "vragent/error.hpp"

namespace vragent {

namespace {

// Byte cap that never splits a UTF-8 code point.
std::string cap_utf8(const std::string& s, size_t max_chars) {
    if (max_chars == 0 || s.size() <= max_chars) return s;
    size_t end = max_chars;
    while (end > 0 && (static_cast<unsigned char>(s[end]) & 0xC0) == 0x80) --end;
    return s.substr(0, end);
}

}  // namespace

const char* observation_kind_name(ObservationKind k) {
    switch (k) {
        case ObservationKind::RetrievedPage: return "retrieved_page";
        case ObservationKind::CropResult: return "crop_result";
        case ObservationKind::NoNewPages: return "no_new_pages";
        case ObservationKind::InvalidActionNotice: return "invalid_action_notice";
        case ObservationKind::ForcedAnswerRequest: return "forced_answer_request";
    }
    return "?";
}

std::optional<ObservationKind> observation_kind_from_name(const std::string& s) {
    if (s == "retrieved_page") return ObservationKind::RetrievedPage;
    if (s == "crop_result") return ObservationKind::CropResult;
    if (s == "no_new_pages") return ObservationKind::NoNewPages;
    if (s == "invalid_action_notice") return ObservationKind::InvalidActionNotice;
    if (s == "forced_answer_request") return ObservationKind::ForcedAnswerRequest;
    return std::nullopt;
}

const char* trajectory_status_name(TrajectoryStatus s) {
    switch (s) {
        case TrajectoryStatus::Running: return "running";
        case TrajectoryStatus::Answered: return "answered";
        case TrajectoryStatus::ForcedAnswered: return "forced_answered";
        case TrajectoryStatus::Exhausted: return "exhausted";
    }
    return "?";
}

std::optional<TrajectoryStatus> trajectory_status_from_name(const std::string& s) {
    if (s == "running") return TrajectoryStatus::Running;
    if (s == "answered") return TrajectoryStatus::Answered;
    if (s == "forced_answered") return TrajectoryStatus::ForcedAnswered;
    if (s == "exhausted") return TrajectoryStatus::Exhausted;
    return std::nullopt;
}

bool EvidenceSpace::contains(const std::string& page_id) const {
    return find(page_id) != nullptr;
}

const EvidenceEntry* EvidenceSpace::find(const std::string& page_id) const {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const EvidenceEntry& e) { return e.page_id == page_id; });
    return it == entries_.end() ? nullptr : &*it;
}

void EvidenceSpace::update(const std::string& page_id, const std::string& think,
                           EvidencePhase phase, size_t max_chars) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const EvidenceEntry& e) { return e.page_id == page_id; });
    if (phase == EvidencePhase::PreCrop) {
        if (it != entries_.end()) return;  // never amend pre on revisit
        entries_.push_back({page_id, cap_utf8(think, max_chars), std::nullopt});
        return;
    }
    if (it == entries_.end()) {
        raise(Errc::PostCropWithoutPre, "no pre entry for page '" + page_id + "'");
    }
    it->post = cap_utf8(think, max_chars);  // latest crop wins
}

EvidenceSpace update_evidence(EvidenceSpace evidence, const std::string& page_id,
                              const std::string& think, EvidencePhase phase,
                              size_t max_chars) {
    evidence.update(page_id, think, phase, max_chars);
    return evidence;
}

bool Trajectory::has_retrieved(const std::string& page_id) const {
    return std::find(retrieved_page_ids.begin(), retrieved_page_ids.end(), page_id) !=
           retrieved_page_ids.end();
}

void append_turn(Trajectory& traj, Turn turn, bool forced) {
    if (traj.status != TrajectoryStatus::Running) {
        raise(Errc::AppendAfterTerminal,
              "trajectory is " + std::string(trajectory_status_name(traj.status)));
    }
    int last_index = traj.turns.empty() ? 0 : traj.turns.back().index;
    if (turn.index == 0) {
        turn.index = last_index + 1;
    } else if (turn.index <= last_index) {
        raise(Errc::BadInput, "turn index not increasing");
    }

    const bool is_answer = turn.response.action.kind == Action::Kind::Answer;
    if (is_answer && turn.observation) {
        raise(Errc::BadInput, "terminal answer turn carries an observation");
    }
    if (!is_answer && !turn.observation) {
        raise(Errc::BadInput, "non-terminal turn missing observation");
    }
    if (forced && !is_answer) {
        raise(Errc::BadInput, "forced flag on a non-answer turn");
    }

    if (turn.response.action.kind == Action::Kind::Search && turn.observation &&
        turn.observation->kind == ObservationKind::RetrievedPage) {
        const std::string& pid = turn.observation->page->page_id;
        if (traj.has_retrieved(pid)) {
            raise(Errc::BadInput, "duplicate retrieved page '" + pid + "'");
        }
        traj.retrieved_page_ids.push_back(pid);
    }

    if (is_answer) {
        traj.final_answer = turn.response.action.text;
        traj.status = forced ? TrajectoryStatus::ForcedAnswered : TrajectoryStatus::Answered;
    }
    traj.turns.push_back(std::move(turn));
}

Trajectory replay_trajectory(const Query& query, const std::vector<Turn>& turns,
                             TrajectoryStatus final_status, size_t evidence_max_chars) {
    Trajectory traj;
    traj.query = query;
    const Observation* prev_obs = nullptr;
    for (const Turn& t : turns) {
        if (prev_obs && prev_obs->page) {
            if (prev_obs->kind == ObservationKind::RetrievedPage) {
                traj.evidence.update(prev_obs->page->page_id, t.response.think,
                                     EvidencePhase::PreCrop, evidence_max_chars);
            } else if (prev_obs->kind == ObservationKind::CropResult) {
                traj.evidence.update(prev_obs->page->page_id, t.response.think,
                                     EvidencePhase::PostCrop, evidence_max_chars);
            }
        }
        bool terminal_forced = final_status == TrajectoryStatus::ForcedAnswered &&
                               t.response.action.kind == Action::Kind::Answer;
        append_turn(traj, t, terminal_forced);
        prev_obs = traj.turns.back().observation ? &*traj.turns.back().observation : nullptr;
    }
    if (final_status == TrajectoryStatus::Exhausted) {
        traj.status = TrajectoryStatus::Exhausted;
    }
    return traj;
}

namespace {

nlohmann::json action_to_json(const Action& a) {
    nlohmann::json j;
    j["type"] = action_kind_name(a.kind);
    switch (a.kind) {
        case Action::Kind::Search: j["query"] = a.text; break;
        case Action::Kind::Crop: j["bbox"] = a.bbox; break;
        case Action::Kind::Answer: j["text"] = a.text; break;
    }
    return j;
}

Action action_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "search") return Action::search(j.at("query").get<std::string>());
    if (type == "crop") return Action::crop(j.at("bbox").get<BBox>());
    if (type == "answer") {
        Action a;
        a.kind = Action::Kind::Answer;
        a.text = j.at("text").get<std::string>();
        return a;
    }
    raise(Errc::BadInput, "unknown action type '" + type + "'");
}

nlohmann::json response_to_json(const AgentResponse& r) {
    return {{"think", r.think}, {"action", action_to_json(r.action)}, {"raw_text", r.raw_text}};
}

AgentResponse response_from_json(const nlohmann::json& j) {
    AgentResponse r;
    r.think = j.at("think").get<std::string>();
    r.action = action_from_json(j.at("action"));
    r.raw_text = j.at("raw_text").get<std::string>();
    return r;
}

}  // namespace

nlohmann::json to_json(const Query& q) {
    nlohmann::json j;
    j["id"] = q.id;
    j["text"] = q.text;
    if (q.reference_answer) j["reference_answer"] = *q.reference_answer;
    if (!q.reference_pages.empty()) j["reference_pages"] = q.reference_pages;
    return j;
}

Query query_from_json(const nlohmann::json& j) {
    Query q;
    q.id = j.at("id").get<std::string>();
    q.text = j.at("text").get<std::string>();
    if (j.contains("reference_answer") && !j.at("reference_answer").is_null()) {
        q.reference_answer = j.at("reference_answer").get<std::string>();
    }
    if (j.contains("reference_pages") && !j.at("reference_pages").is_null()) {
        q.reference_pages = j.at("reference_pages").get<std::vector<std::string>>();
    }
    return q;
}

nlohmann::json to_json(const Observation& o) {
    nlohmann::json j;
    j["kind"] = observation_kind_name(o.kind);
    if (o.page) {
        j["page"] = {{"page_id", o.page->page_id},
                     {"width_px", o.page->width_px},
                     {"height_px", o.page->height_px}};
    }
    if (o.crop_box) j["crop_box"] = *o.crop_box;
    j["prompt_text"] = o.prompt_text;
    return j;
}

Observation observation_from_json(const nlohmann::json& j) {
    Observation o;
    auto kind = observation_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) raise(Errc::BadInput, "unknown observation kind");
    o.kind = *kind;
    if (j.contains("page") && !j.at("page").is_null()) {
        const auto& p = j.at("page");
        o.page = PageRef{p.at("page_id").get<std::string>(), p.at("width_px").get<int>(),
                         p.at("height_px").get<int>()};
    }
    if (j.contains("crop_box") && !j.at("crop_box").is_null()) {
        o.crop_box = j.at("crop_box").get<std::array<int, 4>>();
    }
    o.prompt_text = j.at("prompt_text").get<std::string>();
    return o;
}

nlohmann::json to_json(const Turn& t) {
    nlohmann::json j;
    j["index"] = t.index;
    j["response"] = response_to_json(t.response);
    j["observation"] = t.observation ? to_json(*t.observation) : nlohmann::json();
    if (!t.invalid_attempts.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& a : t.invalid_attempts) {
            arr.push_back({{"raw_text", a.raw_text}, {"reason", a.reason}});
        }
        j["invalid_attempts"] = arr;
    }
    return j;
}

Turn turn_from_json(const nlohmann::json& j) {
    Turn t;
    t.index = j.at("index").get<int>();
    t.response = response_from_json(j.at("response"));
    if (j.contains("observation") && !j.at("observation").is_null()) {
        t.observation = observation_from_json(j.at("observation"));
    }
    if (j.contains("invalid_attempts")) {
        for (const auto& a : j.at("invalid_attempts")) {
            t.invalid_attempts.push_back(
                {a.at("raw_text").get<std::string>(), a.at("reason").get<std::string>()});
        }
    }
    return t;
}

nlohmann::json to_json(const Trajectory& traj) {
    nlohmann::json j;
    j["query"] = to_json(traj.query);
    nlohmann::json turns = nlohmann::json::array();
    for (const Turn& t : traj.turns) turns.push_back(to_json(t));
    j["turns"] = std::move(turns);
    nlohmann::json ev = nlohmann::json::array();
    for (const EvidenceEntry& e : traj.evidence.entries()) {
        nlohmann::json entry;
        entry["page_id"] = e.page_id;
        entry["pre"] = e.pre;
        entry["post"] = e.post ? nlohmann::json(*e.post) : nlohmann::json();
        ev.push_back(std::move(entry));
    }
    j["evidence"] = std::move(ev);
    j["retrieved_page_ids"] = traj.retrieved_page_ids;
    j["status"] = trajectory_status_name(traj.status);
    j["final_answer"] = traj.final_answer ? nlohmann::json(*traj.final_answer) : nlohmann::json();
    return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
    Trajectory traj;
    traj.query = query_from_json(j.at("query"));
    for (const auto& t : j.at("turns")) traj.turns.push_back(turn_from_json(t));
    for (const auto& e : j.at("evidence")) {
        EvidenceEntry entry;
        entry.page_id = e.at("page_id").get<std::string>();
        entry.pre = e.at("pre").get<std::string>();
        if (!e.at("post").is_null()) entry.post = e.at("post").get<std::string>();
        traj.evidence.update(entry.page_id, entry.pre, EvidencePhase::PreCrop);
        if (entry.post) traj.evidence.update(entry.page_id, *entry.post, EvidencePhase::PostCrop);
    }
    traj.retrieved_page_ids = j.at("retrieved_page_ids").get<std::vector<std::string>>();
    auto status = trajectory_status_from_name(j.at("status").get<std::string>());
    if (!status) raise(Errc::BadInput, "unknown trajectory status");
    traj.status = *status;
    if (!j.at("final_answer").is_null()) {
        traj.final_answer = j.at("final_answer").get<std::string>();
    }
    return traj;
}

}  // namespace vragent
