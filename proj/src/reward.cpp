#include "vragent/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "vragent/error.hpp"

namespace vragent {

namespace {

// All reward values are multiples of 0.1. Working in integer tenths keeps
// every emitted value the closest double to its exact decimal.
long long to_tenths(double v, const char* what) {
    double scaled = v * 10.0;
    long long t = std::llround(scaled);
    if (std::abs(scaled - static_cast<double>(t)) > 1e-6) {
        raise(Errc::BadInput, std::string(what) + " is not a multiple of 0.1");
    }
    return t;
}

double from_tenths(long long t) {
    return static_cast<double>(t) / 10.0;
}

}  // namespace

CompletenessResult completeness(const Trajectory& traj,
                                const std::vector<std::string>& reference_pages) {
    if (reference_pages.empty()) {
        raise(Errc::BadInput, "reference_pages must be nonempty");
    }
    CompletenessResult res;
    res.t_search_total = static_cast<int>(traj.retrieved_page_ids.size());
    std::unordered_set<std::string> remaining(reference_pages.begin(), reference_pages.end());
    for (std::size_t i = 0; i < traj.retrieved_page_ids.size(); ++i) {
        remaining.erase(traj.retrieved_page_ids[i]);
        if (remaining.empty()) {
            res.complete = true;
            res.t_star = static_cast<int>(i + 1);
            break;
        }
    }
    return res;
}

double retrieval_reward(bool complete, std::optional<int> delta) {
    if (!complete) {
        if (delta) raise(Errc::BadInput, "delta present for incomplete retrieval");
        return -1.0;
    }
    if (!delta) raise(Errc::BadInput, "delta missing for complete retrieval");
    if (*delta < 0) raise(Errc::BadInput, "negative delta");
    if (*delta == 0) return -0.5;
    if (*delta == 1) return 0.0;
    return from_tenths(-static_cast<long long>(*delta));
}

double answer_reward(const Trajectory& traj, JudgePort& judge, bool complete) {
    if (!traj.final_answer) {
        raise(Errc::BadInput, "trajectory has no final answer");
    }
    if (complete) {
        const std::string reference =
            traj.query.reference_answer ? *traj.query.reference_answer : std::string();
        int c = judge.correctness(traj.query.text, reference, *traj.final_answer);
        if (c != 0 && c != 1) raise(Errc::JudgeFailure, "correctness outside {0,1}");
        return static_cast<double>(c);
    }
    double h = judge.honesty(*traj.final_answer);
    long long t = to_tenths(h, "honesty");
    if (t != 0 && t != 2) raise(Errc::JudgeFailure, "honesty outside {0,0.2}");
    return from_tenths(t);
}

bool format_flag(const Trajectory& traj) {
    if (traj.status == TrajectoryStatus::Running) {
        raise(Errc::BadInput, "format_flag on a running trajectory");
    }
    return traj.retrieved_page_ids.empty();
}

double total_reward(double r_ans, double r_ret, bool format_invalid) {
    if (format_invalid) return -1.0;
    return from_tenths(to_tenths(r_ans, "r_ans") + to_tenths(r_ret, "r_ret"));
}

RewardBreakdown score_trajectory(const Trajectory& traj, JudgePort& judge) {
    RewardBreakdown b;
    auto comp = completeness(traj, traj.query.reference_pages);
    b.complete = comp.complete;
    b.t_star = comp.t_star;
    b.t_search_total = comp.t_search_total;
    b.delta = comp.delta();
    b.r_ret = retrieval_reward(b.complete, b.delta);
    b.r_ans = answer_reward(traj, judge, b.complete);
    b.format_invalid = format_flag(traj);
    b.total = total_reward(b.r_ans, b.r_ret, b.format_invalid);
    return b;
}

nlohmann::json to_json(const RewardBreakdown& b) {
    nlohmann::json j;
    j["r_ans"] = b.r_ans;
    j["r_ret"] = b.r_ret;
    j["format_invalid"] = b.format_invalid;
    j["total"] = b.total;
    j["t_star"] = b.t_star ? nlohmann::json(*b.t_star) : nlohmann::json();
    j["t_search_total"] = b.t_search_total;
    j["delta"] = b.delta ? nlohmann::json(*b.delta) : nlohmann::json();
    j["complete"] = b.complete;
    return j;
}

ScriptedJudge::ScriptedJudge(std::vector<std::string> honesty_phrases)
    : phrases_(std::move(honesty_phrases)) {}

std::vector<std::string> ScriptedJudge::default_honesty_phrases() {
    return {"cannot determine", "cannot be determined", "insufficient information",
            "not enough information", "unable to determine"};
}

std::string ScriptedJudge::normalize(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            pending_space = true;
        }
    }
    return out;
}

int ScriptedJudge::correctness(const std::string& question, const std::string& reference,
                               const std::string& prediction) {
    (void)question;
    return normalize(reference) == normalize(prediction) && !normalize(reference).empty() ? 1 : 0;
}

double ScriptedJudge::honesty(const std::string& prediction) {
    const std::string norm = normalize(prediction);
    for (const auto& phrase : phrases_) {
        if (norm.find(normalize(phrase)) != std::string::npos) return 0.2;
    }
    return 0.0;
}

}  // namespace vragent
