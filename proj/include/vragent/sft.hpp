#pragma once

#include <string>
#include <vector>

#include "vragent/reward.hpp"
#include "vragent/templates.hpp"
#include "vragent/trajectory.hpp"

namespace vragent {

enum class SftRejection {
    BboxNotAfterRetrieval,
    TrivialFullImageCrop,
    IncompleteRetrieval,
    TooManySearches,
    WrongAnswer,
};

const char* sft_rejection_name(SftRejection r);

struct FilterVerdict {
    bool accepted = false;
    std::vector<SftRejection> rejections;  // accepted <=> empty
};

struct SftFilterOptions {
    int max_searches = 10;
    DisplayedSpace displayed_space{};
};

// Evaluates all quality rules and lists every violation: crops must follow
// a retrieval, full-image crops are trivial, all reference pages must be
// retrieved, over-long searches are dropped, and the final answer must
// match the reference per the judge.
FilterVerdict sft_filter(const Trajectory& traj, const std::vector<std::string>& reference_pages,
                         const std::string& reference_answer, JudgePort& judge,
                         const SftFilterOptions& options = {});

// Statement injected into the final pre-verification think; also the
// double-augmentation sentinel.
const std::string& verification_intent_statement();

// Rewrites every search query to the original question, converts the final
// answer turn into a verification search against `verification_page`
// (which must be previously unseen), and appends a terminal turn carrying
// `verification_reasoning` plus the original answer.
Trajectory sft_augment(const Trajectory& traj, const std::string& verification_reasoning,
                       const PageRef& verification_page, const PromptTemplateSet& templates);

}  // namespace vragent
