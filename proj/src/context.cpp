#include "vragent/context.hpp"

#include "vragent/error.hpp"

namespace vragent {

namespace {

std::map<std::string, std::string> base_values(const Query& query, const EvidenceSpace& evidence,
                                               const ObservationPromptExtra& extra = {}) {
    return {
        {"question", query.text},
        {"evidence", render_evidence_block(evidence)},
        {"reason", extra.reason},
        {"turn", extra.turn ? std::to_string(*extra.turn) : std::string()},
    };
}

std::optional<ImageRef> observation_image(const Observation& obs) {
    if (obs.kind == ObservationKind::RetrievedPage && obs.page) {
        return ImageRef{*obs.page, std::nullopt};
    }
    if (obs.kind == ObservationKind::CropResult && obs.page) {
        return ImageRef{*obs.page, obs.crop_box};
    }
    return std::nullopt;
}

}  // namespace

size_t ContextWindow::image_count() const {
    size_t n = 0;
    for (const auto& [resp, obs] : recent_turns) {
        (void)resp;
        if (observation_image(obs)) ++n;
    }
    for (const auto& m : trailing) {
        if (m.image) ++n;
    }
    return n;
}

std::vector<Message> ContextWindow::to_messages() const {
    std::vector<Message> out = pinned;
    for (const auto& [resp, obs] : recent_turns) {
        out.push_back({"assistant", resp.raw_text, std::nullopt});
        out.push_back({"user", obs.prompt_text, observation_image(obs)});
    }
    for (const auto& m : trailing) out.push_back(m);
    return out;
}

std::string render_evidence_block(const EvidenceSpace& evidence) {
    std::string out = "Evidence space:\n";
    if (evidence.empty()) {
        out += "none";
        return out;
    }
    bool first = true;
    for (const EvidenceEntry& e : evidence.entries()) {
        if (!first) out += "\n";
        first = false;
        out += "[" + e.page_id + "]\n";
        out += "initial: " + e.pre;
        if (e.post) {
            out += "\nafter crop: " + *e.post;
        }
    }
    return out;
}

ContextWindow build_context(const Trajectory& traj, const PromptTemplateSet& templates,
                            int window) {
    if (window < 1) raise(Errc::BadInput, "window size must be >= 1");
    ContextWindow cw;
    cw.window = window;
    auto values = base_values(traj.query, traj.evidence);
    cw.pinned.push_back({"system", render_template(templates.system, values), std::nullopt});
    cw.pinned.push_back({"user", render_template(templates.user, values), std::nullopt});
    cw.pinned.push_back({"user", render_evidence_block(traj.evidence), std::nullopt});

    size_t keep = std::min(static_cast<size_t>(window), traj.turns.size());
    for (size_t i = traj.turns.size() - keep; i < traj.turns.size(); ++i) {
        const Turn& t = traj.turns[i];
        if (!t.observation) continue;  // terminal turn has nothing to observe
        cw.recent_turns.emplace_back(t.response, *t.observation);
    }
    return cw;
}

std::string render_observation_prompt(ObservationKind kind, const Query& query,
                                      const EvidenceSpace& evidence,
                                      const PromptTemplateSet& templates,
                                      const ObservationPromptExtra& extra) {
    auto values = base_values(query, evidence, extra);
    switch (kind) {
        case ObservationKind::RetrievedPage: {
            std::string out = render_template(templates.image_observation, values);
            out += "\n\n" + render_template(templates.crop_evaluation, values);
            if (extra.verification) {
                out += "\n\n" + render_template(templates.verification_hint, values);
            }
            return out;
        }
        case ObservationKind::CropResult:
            return render_template(templates.crop_correction, values);
        case ObservationKind::NoNewPages:
            return render_template(templates.no_image, values);
        case ObservationKind::ForcedAnswerRequest:
            return render_template(templates.forced_answer, values);
        case ObservationKind::InvalidActionNotice:
            return render_template(templates.invalid_action, values);
    }
    raise(Errc::BadInput, "unknown observation kind");
}

std::string render_verification_hint(const Query& query, const PromptTemplateSet& templates) {
    return render_template(templates.verification_hint,
                           base_values(query, EvidenceSpace{}));
}

}  // namespace vragent
