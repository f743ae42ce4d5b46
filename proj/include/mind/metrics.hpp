#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/engine.hpp"

namespace mind {

// One mind-reading measurement: an agent's guess of the proposer's hidden
// weight next to the truth.
struct TomPair {
    int w_true = 1;
    int w_pred = 1;
};

struct TomStats {
    std::size_t n = 0;
    double mae = 0.0;
    double acc1 = 0.0;  // fraction of guesses within +-1
    double acc2 = 0.0;  // fraction within +-2
    std::optional<double> pearson;  // absent for n < 2 or a constant side
};

struct SizeSlice {
    std::size_t cases = 0;
    std::size_t debate_cases = 0;
    double debate_ratio = 0.0;
};

struct MetricsReport {
    std::size_t cases = 0;
    std::size_t debate_cases = 0;
    double total_fidelity = 0.0;
    std::optional<double> debate_hit_rate;  // absent when no debate cases exist
    double debate_ratio = 0.0;
    double high_w_hit = 0.0;
    double s_total_raw = 0.0;
    double s_total_per_case = 0.0;
    std::optional<double> jain_mean;  // absent when every group scored zero
    std::optional<TomStats> tom;      // absent when no appraisal pairs exist
    std::vector<std::string> scenario_ids;         // sorted, unique
    std::map<int, SizeSlice> by_group_size;
};

// Mean over cases of the per-case mean agent match rate. Errors on empty input.
double total_fidelity(const std::vector<ItemOutcome>& outcomes);

// Among debate-resolved cases, how often a top-weight agent's value prevailed.
// Absent when nothing was resolved by debate.
std::optional<double> debate_hit_rate(const std::vector<ItemOutcome>& outcomes);

// Fraction of cases resolved by debate rather than fallback.
double debate_ratio(const std::vector<ItemOutcome>& outcomes);

// Over all cases (fallbacks included): how often a top-weight agent matched.
double high_w_hit(const std::vector<ItemOutcome>& outcomes);

// Weight-weighted satisfied preference mass: raw sum and per-case mean.
struct Satisfaction {
    double raw = 0.0;
    double per_case = 0.0;
};
Satisfaction total_satisfaction(const std::vector<ItemOutcome>& outcomes);

// Jain's index over one group's per-agent scores; absent when all are zero.
std::optional<double> jain_fairness(const std::vector<double>& scores);

// Mean Jain's index across groups (scenario = group); all-zero groups are
// excluded, and the mean is absent when every group was excluded.
std::optional<double> jain_mean(const std::vector<ItemOutcome>& outcomes);

TomStats tom_metrics(const std::vector<TomPair>& pairs);

// Join hidden appraisal events with the item proposer's true weight.
std::vector<TomPair> harvest_tom_pairs(const std::vector<TranscriptEvent>& events,
                                       const std::vector<ItemOutcome>& outcomes);

MetricsReport compute_report(const std::vector<ItemOutcome>& outcomes,
                             const std::vector<TranscriptEvent>& events);

inline constexpr std::string_view kReportSchema = "mind-report/1";

nlohmann::json report_to_json(const MetricsReport& r);
MetricsReport report_from_json(const nlohmann::json& j);
void write_report(const std::string& path, const MetricsReport& r);
MetricsReport read_report(const std::string& path);

}  // namespace mind
