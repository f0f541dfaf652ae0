#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "vragent/trajectory.hpp"

namespace vragent {

// Binary answer judgement plus the partial-credit honesty check used when
// retrieval is incomplete. correctness returns 0 or 1; honesty returns 0
// or 0.2.
class JudgePort {
public:
    virtual ~JudgePort() = default;
    virtual int correctness(const std::string& question, const std::string& reference,
                            const std::string& prediction) = 0;
    virtual double honesty(const std::string& prediction) = 0;
};

struct RewardBreakdown {
    double r_ans = 0.0;
    double r_ret = 0.0;
    bool format_invalid = false;
    double total = 0.0;
    std::optional<int> t_star;   // search-order position of first full coverage
    int t_search_total = 0;      // searches that returned a page
    std::optional<int> delta;    // t_search_total - t_star, when complete
    bool complete = false;
};

struct CompletenessResult {
    bool complete = false;
    std::optional<int> t_star;
    int t_search_total = 0;

    std::optional<int> delta() const {
        return complete ? std::optional<int>(t_search_total - *t_star) : std::nullopt;
    }
};

// t* counts search-order positions (crop and invalid turns are not search
// turns). reference_pages must be nonempty.
CompletenessResult completeness(const Trajectory& traj,
                                const std::vector<std::string>& reference_pages);

// incomplete -> -1.0; delta 0 -> -0.5; delta 1 -> 0.0 (one verification,
// optimal); delta >= 2 -> -0.1 * delta. All values exact decimals.
double retrieval_reward(bool complete, std::optional<int> delta);

// Gated: complete trajectories get the correctness judge, incomplete ones
// the honesty judge. Exactly one judge is consulted.
double answer_reward(const Trajectory& traj, JudgePort& judge, bool complete);

// true iff no page-returning search precedes the terminal answer.
bool format_flag(const Trajectory& traj);

// total = (r_ans + r_ret) * (1 - format) - 1 * format, exact in tenths.
double total_reward(double r_ans, double r_ret, bool format_invalid);

RewardBreakdown score_trajectory(const Trajectory& traj, JudgePort& judge);

nlohmann::json to_json(const RewardBreakdown& b);

// Test/offline judge: correctness is normalized string equality, honesty is
// acknowledgment-phrase membership.
class ScriptedJudge final : public JudgePort {
public:
    explicit ScriptedJudge(std::vector<std::string> honesty_phrases = default_honesty_phrases());

    int correctness(const std::string& question, const std::string& reference,
                    const std::string& prediction) override;
    double honesty(const std::string& prediction) override;

    static std::vector<std::string> default_honesty_phrases();
    static std::string normalize(const std::string& s);

private:
    std::vector<std::string> phrases_;
};

}  // namespace vragent
