#include "vragent/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "vragent/embedder.hpp"
#include "vragent/error.hpp"

namespace vragent {

uint64_t derive_seed(uint64_t root_seed, const std::string& query_id) {
    uint64_t h = fnv1a64(query_id);
    h ^= root_seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

nlohmann::json to_json(const RunSummary& s) {
    nlohmann::json j;
    j["samples"] = s.samples;
    j["failed"] = s.failed;
    j["accuracy"] = s.accuracy ? nlohmann::json(*s.accuracy) : nlohmann::json();
    j["completeness_pct"] =
        s.completeness_pct ? nlohmann::json(*s.completeness_pct) : nlohmann::json();
    j["avg_retrieved"] = s.avg_retrieved;
    j["bbox_usage_rate"] = s.bbox_usage_rate;
    j["finish_rate"] = s.finish_rate;
    j["invalid_action_rate"] = s.invalid_action_rate;
    j["mean_total"] = s.mean_total ? nlohmann::json(*s.mean_total) : nlohmann::json();
    return j;
}

RunSummary summarize(const std::vector<Trajectory>& trajectories,
                     const std::vector<std::optional<int>>& judged,
                     const std::vector<std::optional<RewardBreakdown>>& rewards) {
    RunSummary s;
    s.samples = static_cast<int>(trajectories.size());
    if (trajectories.empty()) return s;

    int finished = 0, invalid = 0, bbox_used = 0;
    int with_refs = 0, complete = 0;
    double retrieved_sum = 0.0;
    for (const Trajectory& t : trajectories) {
        if (t.final_answer && !t.final_answer->empty()) ++finished;
        bool any_invalid = false, any_crop = false;
        for (const Turn& turn : t.turns) {
            if (!turn.invalid_attempts.empty()) any_invalid = true;
            if (turn.response.action.kind == Action::Kind::Crop) any_crop = true;
        }
        if (any_invalid) ++invalid;
        if (any_crop) ++bbox_used;
        retrieved_sum += static_cast<double>(t.retrieved_page_ids.size());
        if (!t.query.reference_pages.empty()) {
            ++with_refs;
            if (completeness(t, t.query.reference_pages).complete) ++complete;
        }
    }
    const double n = static_cast<double>(s.samples);
    s.finish_rate = finished / n;
    s.invalid_action_rate = invalid / n;
    s.bbox_usage_rate = bbox_used / n;
    s.avg_retrieved = retrieved_sum / n;
    if (with_refs > 0) {
        s.completeness_pct = 100.0 * complete / with_refs;
    }

    int judged_n = 0, judged_sum = 0;
    for (const auto& c : judged) {
        if (c) {
            ++judged_n;
            judged_sum += *c;
        }
    }
    if (judged_n > 0) s.accuracy = static_cast<double>(judged_sum) / judged_n;

    int reward_n = 0;
    double reward_sum = 0.0;
    for (const auto& r : rewards) {
        if (r) {
            ++reward_n;
            reward_sum += r->total;
        }
    }
    if (reward_n > 0) s.mean_total = reward_sum / reward_n;
    return s;
}

std::vector<SampleResult> run_eval_set(const std::vector<Query>& samples, const Environment& env,
                                       const PolicyFactory& make_policy, JudgePort* judge,
                                       const RunnerOptions& options) {
    std::vector<Query> ordered = samples;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Query& a, const Query& b) { return a.id < b.id; });

    std::vector<SampleResult> results(ordered.size());
    std::atomic<size_t> next{0};
    const int workers = std::max(1, std::min<int>(options.parallelism,
                                                  static_cast<int>(ordered.size())));

    auto work = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= ordered.size()) break;
            SampleResult& r = results[i];
            r.query = ordered[i];
            try {
                auto policy = make_policy(r.query, derive_seed(options.seed, r.query.id));
                r.loop = run_trajectory(r.query, env, *policy, options.loop);
                if (judge && r.query.reference_answer && r.loop.trajectory.final_answer) {
                    r.judged_correct = judge->correctness(r.query.text, *r.query.reference_answer,
                                                          *r.loop.trajectory.final_answer);
                }
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return results;
}

}  // namespace vragent
