#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/metrics.hpp"
#include "mind/policy.hpp"

namespace mind {

enum class Backend { Rule, Llm, Fixture };

std::string_view backend_name(Backend b) noexcept;
Backend backend_from_name(std::string_view name);

struct RunConfig {
    PolicyConfig policy;
    Backend backend = Backend::Rule;
    std::uint64_t seed = 0;
    std::vector<std::string> scenario_paths;
    std::string out_dir;
    int parallelism = 1;
    bool soft_only = false;  // restrict the report to negotiated (soft) items
    std::string fixture_path;
    std::string model = "gpt-4.1-mini-2025-04-14";
    std::string api_base = "https://api.openai.com";
    std::string api_key_env = "MIND_API_KEY";
};

inline constexpr std::string_view kRunConfigSchema = "mind-config/1";
inline constexpr std::string_view kCheckpointSchema = "mind-checkpoint/1";

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

struct RunResult {
    std::string out_dir;
    MetricsReport report;
    std::size_t scenarios = 0;
    std::size_t resumed = 0;  // scenarios replayed from a checkpoint
};

// Validate every scenario (aborting with the file and its violations on the
// first invalid one), negotiate them all, and leave config.json,
// transcripts.jsonl, outcomes.json and report.json in cfg.out_dir. Output
// bytes are a pure function of config and inputs. A transport failure writes
// checkpoint.json with all finished scenarios; rerunning with resume=true
// picks up the remainder.
RunResult run_experiment(const RunConfig& cfg, bool resume = false);

// Recompute a report from a run directory's stored outcomes + transcripts.
MetricsReport eval_run(const std::string& run_dir, bool soft_only = false);

struct MetricDelta {
    std::string name;
    std::optional<double> a;
    std::optional<double> b;
    std::optional<double> delta;    // b - a
    std::optional<double> percent;  // relative change, absent when a == 0
};

struct Comparison {
    std::vector<MetricDelta> rows;
    std::string text;  // aligned table rendering
};

// Per-metric deltas between two reports covering the same scenario set;
// mismatched sets are an error.
Comparison compare_runs(const MetricsReport& a, const MetricsReport& b);

}  // namespace mind
