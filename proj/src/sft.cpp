#include "vragent/sft.hpp"

#include <algorithm>

#include "vragent/context.hpp"
#include "vragent/error.hpp"

namespace vragent {

const char* sft_rejection_name(SftRejection r) {
    switch (r) {
        case SftRejection::BboxNotAfterRetrieval: return "bbox_not_after_retrieval";
        case SftRejection::TrivialFullImageCrop: return "trivial_full_image_crop";
        case SftRejection::IncompleteRetrieval: return "incomplete_retrieval";
        case SftRejection::TooManySearches: return "too_many_searches";
        case SftRejection::WrongAnswer: return "wrong_answer";
    }
    return "?";
}

FilterVerdict sft_filter(const Trajectory& traj, const std::vector<std::string>& reference_pages,
                         const std::string& reference_answer, JudgePort& judge,
                         const SftFilterOptions& options) {
    FilterVerdict v;

    bool bbox_ungrounded = false;
    bool trivial_crop = false;
    int search_turns = 0;
    for (std::size_t i = 0; i < traj.turns.size(); ++i) {
        const Turn& t = traj.turns[i];
        if (t.response.action.kind == Action::Kind::Search) ++search_turns;
        if (t.response.action.kind != Action::Kind::Crop) continue;
        const bool grounded = i > 0 && traj.turns[i - 1].observation &&
                              traj.turns[i - 1].observation->kind == ObservationKind::RetrievedPage;
        if (!grounded) bbox_ungrounded = true;
        const BBox& b = t.response.action.bbox;
        if (b[0] == 0 && b[1] == 0 && b[2] == options.displayed_space.width &&
            b[3] == options.displayed_space.height) {
            trivial_crop = true;
        }
    }
    if (bbox_ungrounded) v.rejections.push_back(SftRejection::BboxNotAfterRetrieval);
    if (trivial_crop) v.rejections.push_back(SftRejection::TrivialFullImageCrop);

    bool complete = false;
    if (!reference_pages.empty()) {
        complete = completeness(traj, reference_pages).complete;
    }
    if (!complete) v.rejections.push_back(SftRejection::IncompleteRetrieval);

    if (search_turns > options.max_searches) {
        v.rejections.push_back(SftRejection::TooManySearches);
    }

    bool answer_ok = false;
    if (traj.final_answer) {
        answer_ok = judge.correctness(traj.query.text, reference_answer, *traj.final_answer) == 1;
    }
    if (!answer_ok) v.rejections.push_back(SftRejection::WrongAnswer);

    v.accepted = v.rejections.empty();
    return v;
}

const std::string& verification_intent_statement() {
    static const std::string kStatement =
        "The gathered evidence should be sufficient; I will run one final verification search "
        "to confirm before answering.";
    return kStatement;
}

Trajectory sft_augment(const Trajectory& traj, const std::string& verification_reasoning,
                       const PageRef& verification_page, const PromptTemplateSet& templates) {
    if (!traj.final_answer || traj.turns.empty() ||
        traj.turns.back().response.action.kind != Action::Kind::Answer) {
        raise(Errc::BadInput, "trajectory has no terminal answer turn");
    }
    for (const Turn& t : traj.turns) {
        if (t.response.think.find(verification_intent_statement()) != std::string::npos) {
            raise(Errc::AlreadyAugmented, "verification round already present");
        }
    }
    if (traj.has_retrieved(verification_page.page_id)) {
        raise(Errc::NoUnseenPageAvailable,
              "page '" + verification_page.page_id + "' was already retrieved");
    }
    if (verification_reasoning.empty()) {
        raise(Errc::BadInput, "verification reasoning must be nonempty");
    }

    const std::string original_answer = *traj.final_answer;
    std::vector<Turn> turns = traj.turns;

    // Anchor every retrieval to the user's question verbatim.
    for (Turn& t : turns) {
        if (t.response.action.kind == Action::Kind::Search) {
            t.response.action.text = traj.query.text;
            t.response.raw_text = render_response(t.response);
        }
    }

    // Final answer turn becomes the verification search.
    Turn& last = turns.back();
    last.response.think += "\n" + verification_intent_statement();
    last.response.action = Action::search(traj.query.text);
    last.response.raw_text = render_response(last.response);
    Observation obs;
    obs.kind = ObservationKind::RetrievedPage;
    obs.page = verification_page;
    ObservationPromptExtra extra;
    extra.verification = true;
    obs.prompt_text = render_observation_prompt(ObservationKind::RetrievedPage, traj.query,
                                                traj.evidence, templates, extra);
    last.observation = obs;

    Turn terminal;
    terminal.index = last.index + 1;
    terminal.response = make_response(verification_reasoning, Action::answer(original_answer));

    turns.push_back(std::move(terminal));
    return replay_trajectory(traj.query, turns, TrajectoryStatus::Answered);
}

}  // namespace vragent
