#pragma once

// Independent brute-force oracles for the test suites. These deliberately
// avoid the engine's code paths: double precision, plain loops, separate
// formula transcriptions.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracles {

// Sum over query rows of the max dot product against page rows, all in
// double precision.
inline double maxsim_bruteforce(const std::vector<std::vector<double>>& query,
                                const std::vector<std::vector<double>>& page) {
    double total = 0.0;
    for (const auto& q : query) {
        double best = -1e300;
        for (const auto& d : page) {
            double dot = 0.0;
            for (size_t k = 0; k < q.size(); ++k) dot += q[k] * d[k];
            best = std::max(best, dot);
        }
        total += best;
    }
    return total;
}

// Full stable sort by descending score; ties keep input order.
inline std::vector<size_t> rank_bruteforce(const std::vector<double>& scores) {
    std::vector<size_t> order(scores.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    return order;
}

struct CoverageResult {
    bool complete = false;
    std::optional<int> t_star;
    int total = 0;
};

// Scans every prefix of the retrieval sequence for reference coverage.
inline CoverageResult coverage_scan(const std::vector<std::string>& retrieved,
                                    const std::set<std::string>& refs) {
    CoverageResult r;
    r.total = static_cast<int>(retrieved.size());
    for (size_t n = 1; n <= retrieved.size(); ++n) {
        std::set<std::string> seen(retrieved.begin(), retrieved.begin() + n);
        bool covered = true;
        for (const auto& ref : refs) {
            if (!seen.count(ref)) covered = false;
        }
        if (covered) {
            r.complete = true;
            r.t_star = static_cast<int>(n);
            break;
        }
    }
    return r;
}

// Independent transcription of the reward formulas, in exact decimal
// tenths. answer_tenths in {0, 2, 10}; delta nullopt = incomplete.
inline double reward_total_oracle(int answer_tenths, std::optional<int> delta,
                                  bool format_invalid) {
    if (format_invalid) return -1.0;
    int ret_tenths;
    if (!delta.has_value()) {
        ret_tenths = -10;
    } else if (*delta == 0) {
        ret_tenths = -5;
    } else if (*delta == 1) {
        ret_tenths = 0;
    } else {
        ret_tenths = -*delta;
    }
    return (answer_tenths + ret_tenths) / 10.0;
}

inline double retrieval_reward_oracle(std::optional<int> delta) {
    if (!delta.has_value()) return -1.0;
    if (*delta == 0) return -0.5;
    if (*delta == 1) return 0.0;
    return -*delta / 10.0;
}

struct SpanOracle {
    int64_t start, end;
    bool agent;
};

// Prefix-sum oracle for mask spans: one span per segment, no merging.
inline std::vector<SpanOracle> mask_prefix_sums(const std::vector<std::pair<std::string, int64_t>>& segments) {
    std::vector<SpanOracle> spans;
    int64_t off = 0;
    for (const auto& [role, len] : segments) {
        spans.push_back({off, off + len, role == "agent"});
        off += len;
    }
    return spans;
}

inline std::vector<std::vector<double>> random_matrix(std::mt19937& rng, size_t rows, size_t dim,
                                                      double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<std::vector<double>> m(rows, std::vector<double>(dim));
    for (auto& row : m) {
        for (auto& v : row) v = dist(rng);
    }
    return m;
}

}  // namespace oracles
