#include "vragent/loop.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

#include "vragent/error.hpp"

namespace vragent {

namespace {

int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim_copy(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string invalid_code(InvalidReason r) {
    switch (r) {
        case InvalidReason::MissingThink: return "missing_think";
        case InvalidReason::NoActionTag: return "no_action_tag";
        case InvalidReason::MultipleActions: return "multiple_actions";
        case InvalidReason::MalformedBbox: return "malformed_bbox";
        case InvalidReason::EmptyPayload: return "empty_payload";
        case InvalidReason::TrailingGarbage: return "trailing_garbage";
    }
    return "invalid";
}

std::string invalid_description(const std::string& code) {
    if (code == "missing_think") return "the mandatory <think> block is missing or empty";
    if (code == "no_action_tag") return "no well-formed action tag was found";
    if (code == "multiple_actions") return "more than one action tag was issued";
    if (code == "malformed_bbox") return "the <bbox> coordinates are malformed or out of range";
    if (code == "empty_payload") return "the action payload is empty";
    if (code == "trailing_garbage") return "unexpected text outside the think/action tags";
    if (code == "crop_not_allowed") {
        return "a <bbox> crop is only allowed immediately after a newly retrieved page";
    }
    return code;
}

// Evidence updates derive from the think of the response generated while
// looking at the previous turn's observation.
void apply_evidence_update(Trajectory& traj, const std::string& think, const LoopConfig& cfg) {
    const Turn* last = traj.last_turn();
    if (!last || !last->observation || !last->observation->page) return;
    const Observation& obs = *last->observation;
    if (obs.kind == ObservationKind::RetrievedPage) {
        traj.evidence.update(obs.page->page_id, think, EvidencePhase::PreCrop,
                             cfg.evidence_max_chars);
    } else if (obs.kind == ObservationKind::CropResult) {
        traj.evidence.update(obs.page->page_id, think, EvidencePhase::PostCrop,
                             cfg.evidence_max_chars);
    }
}

bool crop_allowed(const Trajectory& traj) {
    const Turn* last = traj.last_turn();
    return last && last->observation &&
           last->observation->kind == ObservationKind::RetrievedPage;
}

struct ExtractedAnswer {
    std::string think;
    std::string text;
};

// Forced generations are taken at face value: a proper answer action or a
// bare <answer> tag yields its payload; other tool calls yield an empty
// answer (the model did not answer); tagless plain text is accepted as the
// answer.
ExtractedAnswer extract_answer_lenient(const std::string& raw, DisplayedSpace space) {
    ExtractedAnswer out;
    auto parsed = parse_response(raw, space);
    if (parsed.valid()) {
        if (parsed.response->action.kind == Action::Kind::Answer) {
            return {parsed.response->think, parsed.response->action.text};
        }
        out.think = parsed.response->think;
    } else {
        size_t tb = raw.find("<think>");
        size_t te = raw.find("</think>");
        if (tb != std::string::npos && te != std::string::npos && te > tb) {
            out.think = raw.substr(tb + 7, te - tb - 7);
        }
    }
    size_t ab = raw.find("<answer>");
    if (ab != std::string::npos) {
        size_t ae = raw.find("</answer>", ab + 8);
        if (ae != std::string::npos) {
            out.text = trim_copy(raw.substr(ab + 8, ae - ab - 8));
            return out;
        }
    }
    const bool has_other_tag = raw.find("<search>") != std::string::npos ||
                               raw.find("<bbox>") != std::string::npos ||
                               raw.find("<think>") != std::string::npos;
    out.text = has_other_tag ? std::string() : trim_copy(raw);
    return out;
}

}  // namespace

bool detect_verification(const std::string& think, const LoopConfig& cfg) {
    if (cfg.verification_markers.empty()) return false;
    const std::string hay = lower(think);
    for (const auto& marker : cfg.verification_markers) {
        if (!marker.empty() && hay.find(lower(marker)) != std::string::npos) return true;
    }
    return false;
}

StepResult step(Trajectory& traj, const ParseOutcome& parsed, const Environment& env,
                const LoopConfig& cfg, bool verification) {
    if (traj.status != TrajectoryStatus::Running) {
        raise(Errc::AppendAfterTerminal, "step on a terminal trajectory");
    }

    std::string code;
    if (!parsed.valid()) {
        code = invalid_code(*parsed.reason);
    } else if (parsed.response->action.kind == Action::Kind::Crop && !crop_allowed(traj)) {
        code = "crop_not_allowed";
    }
    if (!code.empty()) {
        Observation notice;
        notice.kind = ObservationKind::InvalidActionNotice;
        ObservationPromptExtra extra;
        extra.reason = invalid_description(code);
        notice.prompt_text = render_observation_prompt(
            ObservationKind::InvalidActionNotice, traj.query, traj.evidence, *env.templates, extra);
        StepResult r;
        r.observation = std::move(notice);
        r.invalid_code = code;
        return r;
    }

    const AgentResponse& resp = *parsed.response;
    apply_evidence_update(traj, resp.think, cfg);

    StepResult r;
    switch (resp.action.kind) {
        case Action::Kind::Answer: {
            Turn turn;
            turn.response = resp;
            append_turn(traj, std::move(turn));
            r.committed = true;
            return r;
        }
        case Action::Kind::Search: {
            QueryEmbedding qe{env.embedder->embed(resp.action.text)};
            RetrievalHit hit = env.index->retrieve_next_unseen(
                qe, static_cast<std::size_t>(cfg.top_k), traj.retrieved_page_ids);
            Observation obs;
            if (hit.page_id) {
                obs.kind = ObservationKind::RetrievedPage;
                obs.page = env.corpus->at(*hit.page_id).ref();
                ObservationPromptExtra extra;
                extra.verification = verification;
                extra.turn = static_cast<int>(traj.turns.size()) + 1;
                obs.prompt_text = render_observation_prompt(
                    ObservationKind::RetrievedPage, traj.query, traj.evidence, *env.templates,
                    extra);
            } else {
                obs.kind = ObservationKind::NoNewPages;
                obs.prompt_text = render_observation_prompt(
                    ObservationKind::NoNewPages, traj.query, traj.evidence, *env.templates);
            }
            Turn turn;
            turn.response = resp;
            turn.observation = obs;
            append_turn(traj, std::move(turn));
            r.observation = std::move(obs);
            r.committed = true;
            return r;
        }
        case Action::Kind::Crop: {
            const Observation& prev = *traj.last_turn()->observation;
            CropRequest req;
            req.page = *prev.page;
            req.bbox_displayed = resp.action.bbox;
            req.displayed_space = env.tools.displayed_space;
            req.margin_px = env.tools.margin_px;
            req.output_size = env.tools.crop_output;
            CropRegion region = map_and_expand(req);

            Observation obs;
            obs.kind = ObservationKind::CropResult;
            obs.page = prev.page;
            obs.crop_box = region.rect_original;
            obs.prompt_text = render_observation_prompt(
                ObservationKind::CropResult, traj.query, traj.evidence, *env.templates);
            Turn turn;
            turn.response = resp;
            turn.observation = obs;
            append_turn(traj, std::move(turn));
            r.observation = std::move(obs);
            r.committed = true;
            return r;
        }
    }
    raise(Errc::BadInput, "unreachable action kind");
}

LoopResult run_trajectory(const Query& query, const Environment& env, PolicyPort& policy,
                          const LoopConfig& cfg) {
    if (!env.index || !env.embedder || !env.corpus || !env.templates) {
        raise(Errc::BadInput, "environment is incomplete");
    }
    if (env.index->page_count() == 0) raise(Errc::EmptyIndex, "run on empty index");
    if (cfg.max_turns < 1 || cfg.window_size < 1) {
        raise(Errc::ConfigError, "max_turns and window_size must be >= 1");
    }

    LoopResult result;
    Trajectory& traj = result.trajectory;
    traj.query = query;

    auto emit = [&](int turn, const std::string& kind, nlohmann::json detail) {
        result.events.push_back({turn, kind, std::move(detail), now_ms()});
    };

    std::vector<InvalidAttempt> pending_attempts;
    bool force_answer = false;

    auto generate = [&](ContextWindow& ctx) -> std::optional<std::string> {
        try {
            return policy.generate(ctx);
        } catch (const Error& e) {
            result.failure = e.what();
        } catch (const std::exception& e) {
            result.failure = std::string("policy backend: ") + e.what();
        }
        traj.status = TrajectoryStatus::Exhausted;
        return std::nullopt;
    };

    for (int t = 1; t <= cfg.max_turns && traj.status == TrajectoryStatus::Running; ++t) {
        ContextWindow ctx = build_context(traj, *env.templates, cfg.window_size);
        pending_attempts.clear();
        int retries = 0;
        while (true) {
            auto raw = generate(ctx);
            if (!raw) return result;
            ParseOutcome parsed = parse_response(*raw, env.tools.displayed_space);
            bool verification = parsed.valid() &&
                                parsed.response->action.kind == Action::Kind::Search &&
                                detect_verification(parsed.response->think, cfg);
            StepResult sr = step(traj, parsed, env, cfg, verification);
            if (sr.invalid_code) {
                pending_attempts.push_back({*raw, *sr.invalid_code});
                emit(static_cast<int>(traj.turns.size()) + 1, "invalid_action",
                     {{"code", *sr.invalid_code}});
                if (retries >= cfg.invalid_retry_limit) {
                    force_answer = true;
                    break;
                }
                ++retries;
                ctx.trailing.push_back({"assistant", *raw, std::nullopt});
                ctx.trailing.push_back({"user", sr.observation->prompt_text, std::nullopt});
                continue;
            }
            // committed
            Turn& committed = traj.turns.back();
            committed.invalid_attempts = std::move(pending_attempts);
            pending_attempts.clear();
            if (verification) emit(committed.index, "verification_hinted", {});
            switch (committed.response.action.kind) {
                case Action::Kind::Search:
                    emit(committed.index, "searched",
                         {{"page_id", committed.observation->page
                                          ? nlohmann::json(committed.observation->page->page_id)
                                          : nlohmann::json()}});
                    break;
                case Action::Kind::Crop:
                    emit(committed.index, "cropped", {{"region", *committed.observation->crop_box}});
                    break;
                case Action::Kind::Answer:
                    emit(committed.index, "answered", {{"text", *traj.final_answer}});
                    break;
            }
            break;
        }
        if (force_answer) break;
    }

    if (traj.status == TrajectoryStatus::Running) {
        // Turn budget or retry budget exhausted: one forced generation.
        ContextWindow ctx = build_context(traj, *env.templates, cfg.window_size);
        const std::string forced_prompt = render_observation_prompt(
            ObservationKind::ForcedAnswerRequest, traj.query, traj.evidence, *env.templates);
        ctx.trailing.push_back({"user", forced_prompt, std::nullopt});
        emit(static_cast<int>(traj.turns.size()) + 1, "forced_answer", {});
        auto raw = generate(ctx);
        if (!raw) return result;
        ExtractedAnswer ans = extract_answer_lenient(*raw, env.tools.displayed_space);
        if (!ans.think.empty()) apply_evidence_update(traj, ans.think, cfg);
        Turn turn;
        turn.response.think = ans.think;
        turn.response.action = Action::answer(ans.text);
        turn.response.raw_text = *raw;
        turn.invalid_attempts = std::move(pending_attempts);
        append_turn(traj, std::move(turn), /*forced=*/true);
        emit(traj.turns.back().index, "answered", {{"text", *traj.final_answer}});
    }
    return result;
}

}  // namespace vragent
