#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vragent/loop.hpp"
#include "vragent/reward.hpp"

namespace vragent {

struct SampleResult {
    Query query;
    LoopResult loop;
    std::optional<int> judged_correct;  // ungated accuracy judgement
    std::optional<std::string> error;   // per-sample hard failure
};

struct RunSummary {
    int samples = 0;
    int failed = 0;
    std::optional<double> accuracy;       // mean judge correctness, when judged
    std::optional<double> completeness_pct;  // over samples with reference pages
    double avg_retrieved = 0.0;
    double bbox_usage_rate = 0.0;
    double finish_rate = 0.0;
    double invalid_action_rate = 0.0;
    std::optional<double> mean_total;  // when rewards were computed
};

nlohmann::json to_json(const RunSummary& s);

// Behavioral metrics over finished trajectories:
//   finish rate        fraction with a non-empty final answer
//   invalid action rate fraction with at least one format-violating action
//   completeness %     fraction (x100) of reference-paged samples whose
//                      reference pages were all retrieved
//   avg retrieved      mean number of retrieved pages per trajectory
//   bbox usage rate    fraction with at least one crop action
RunSummary summarize(const std::vector<Trajectory>& trajectories,
                     const std::vector<std::optional<int>>& judged,
                     const std::vector<std::optional<RewardBreakdown>>& rewards);

// Derives the per-trajectory seed from the root seed and query id, so
// concurrency cannot reorder randomness.
uint64_t derive_seed(uint64_t root_seed, const std::string& query_id);

struct RunnerOptions {
    LoopConfig loop;
    ToolConfig tools;
    int parallelism = 1;
    uint64_t seed = 0;
};

// Runs every sample (sorted by query id), optionally judging accuracy.
// Per-sample failures are recorded, not fatal.
std::vector<SampleResult> run_eval_set(const std::vector<Query>& samples, const Environment& env,
                                       const PolicyFactory& make_policy, JudgePort* judge,
                                       const RunnerOptions& options);

}  // namespace vragent
