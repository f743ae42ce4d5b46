#include "mind/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "mind/llm/agent.hpp"

namespace mind {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Rule: return "rule";
        case Backend::Llm: return "llm";
        case Backend::Fixture: return "fixture";
    }
    return "rule";
}

Backend backend_from_name(std::string_view name) {
    if (name == "rule") return Backend::Rule;
    if (name == "llm") return Backend::Llm;
    if (name == "fixture") return Backend::Fixture;
    throw ParseError("bad-backend", std::string(name));
}

json run_config_to_json(const RunConfig& cfg) {
    return json{{"schema", kRunConfigSchema},
                {"mode", mode_name(cfg.policy.mode)},
                {"backend", backend_name(cfg.backend)},
                {"tau", cfg.policy.tau},
                {"rounds", cfg.policy.max_rounds},
                {"eps", cfg.policy.tone_noise_eps},
                {"seed", cfg.seed},
                {"scenario_paths", cfg.scenario_paths},
                {"out_dir", cfg.out_dir},
                {"parallelism", cfg.parallelism},
                {"soft_only", cfg.soft_only},
                {"fixture_path", cfg.fixture_path},
                {"model", cfg.model},
                {"api_base", cfg.api_base},
                {"api_key_env", cfg.api_key_env}};
}

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("bad-json", "config must be an object");
    if (j.contains("schema") && j["schema"].get<std::string>() != kRunConfigSchema)
        throw ParseError("schema-mismatch", j["schema"].get<std::string>());
    RunConfig cfg;
    if (j.contains("mode")) cfg.policy.mode = mode_from_name(j["mode"].get<std::string>());
    if (j.contains("backend")) cfg.backend = backend_from_name(j["backend"].get<std::string>());
    if (j.contains("tau")) cfg.policy.tau = j["tau"].get<double>();
    if (j.contains("rounds")) cfg.policy.max_rounds = j["rounds"].get<int>();
    if (j.contains("eps")) cfg.policy.tone_noise_eps = j["eps"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("scenario_paths"))
        cfg.scenario_paths = j["scenario_paths"].get<std::vector<std::string>>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("parallelism")) cfg.parallelism = j["parallelism"].get<int>();
    if (j.contains("soft_only")) cfg.soft_only = j["soft_only"].get<bool>();
    if (j.contains("fixture_path")) cfg.fixture_path = j["fixture_path"].get<std::string>();
    if (j.contains("model")) cfg.model = j["model"].get<std::string>();
    if (j.contains("api_base")) cfg.api_base = j["api_base"].get<std::string>();
    if (j.contains("api_key_env")) cfg.api_key_env = j["api_key_env"].get<std::string>();
    if (cfg.policy.tau <= 0.0 || cfg.policy.tau > 1.0)
        throw ParseError("bad-config", "tau must be in (0,1]");
    if (cfg.policy.max_rounds < 1) throw ParseError("bad-config", "rounds must be >= 1");
    if (cfg.backend == Backend::Fixture && cfg.fixture_path.empty())
        throw ParseError("bad-config", "fixture backend requires a fixture path");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("io-error", "cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("bad-json", path);
    return run_config_from_json(j);
}

namespace {

struct LoadedScenario {
    Scenario scenario;
    std::string path;
};

std::vector<LoadedScenario> load_all(const RunConfig& cfg) {
    if (cfg.scenario_paths.empty()) throw HarnessError("no-scenarios", "nothing to run");
    std::vector<LoadedScenario> out;
    for (const auto& path : cfg.scenario_paths) {
        Scenario s = load_scenario(path);
        ValidationReport report = validate_scenario(s);
        if (!report.ok()) throw HarnessError("invalid-scenario", path + ": " + report.summary());
        out.push_back({std::move(s), path});
    }
    std::sort(out.begin(), out.end(), [](const LoadedScenario& a, const LoadedScenario& b) {
        return a.scenario.id < b.scenario.id;
    });
    for (size_t i = 1; i < out.size(); ++i) {
        if (out[i].scenario.id == out[i - 1].scenario.id)
            throw HarnessError("duplicate-scenario", out[i].scenario.id);
    }
    return out;
}

using PolicyFactory = std::function<std::unique_ptr<AgentPolicy>()>;

PolicyFactory make_policy_factory(const RunConfig& cfg) {
    switch (cfg.backend) {
        case Backend::Rule:
            return [] { return std::make_unique<RulePolicy>(); };
        case Backend::Fixture: {
            auto transport = llm::FixtureTransport::replay(cfg.fixture_path);
            auto client = std::make_shared<llm::LlmClient>(transport);
            llm::LlmPolicyOptions opts;
            opts.model = cfg.model;
            return [client, opts] { return std::make_unique<llm::LlmPolicy>(client, opts); };
        }
        case Backend::Llm: {
            const char* key = std::getenv(cfg.api_key_env.c_str());
            if (!key || !*key) throw HarnessError("missing-credential", cfg.api_key_env);
            llm::HttpTransport::Options topts;
            topts.base_url = cfg.api_base;
            topts.api_key = key;
            auto client = std::make_shared<llm::LlmClient>(
                std::make_shared<llm::HttpTransport>(std::move(topts)));
            llm::LlmPolicyOptions opts;
            opts.model = cfg.model;
            return [client, opts] { return std::make_unique<llm::LlmPolicy>(client, opts); };
        }
    }
    throw HarnessError("bad-backend", "unknown backend");
}

std::string checkpoint_path(const RunConfig& cfg) {
    return (fs::path(cfg.out_dir) / "checkpoint.json").string();
}

json scenario_run_to_json(const ScenarioRun& run) {
    json events = json::array();
    for (const auto& e : run.events) events.push_back(event_to_json(e));
    return json{{"events", events}, {"outcomes", outcomes_to_json(run.outcomes)["outcomes"]}};
}

ScenarioRun scenario_run_from_json(const json& j) {
    ScenarioRun run;
    for (const auto& e : j.at("events")) run.events.push_back(event_from_json(e));
    run.outcomes = outcomes_from_json(
        json{{"schema", std::string(kOutcomesSchema)}, {"outcomes", j.at("outcomes")}});
    return run;
}

std::map<std::string, ScenarioRun> load_checkpoint(const RunConfig& cfg) {
    std::map<std::string, ScenarioRun> done;
    std::ifstream in(checkpoint_path(cfg));
    if (!in) return done;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("scenarios"))
        throw ParseError("bad-json", "unreadable checkpoint " + checkpoint_path(cfg));
    if (j.value("schema", "") != kCheckpointSchema)
        throw ParseError("schema-mismatch", "checkpoint schema");
    for (auto it = j["scenarios"].begin(); it != j["scenarios"].end(); ++it)
        done[it.key()] = scenario_run_from_json(it.value());
    return done;
}

void write_checkpoint(const RunConfig& cfg, const std::map<std::string, ScenarioRun>& done,
                      const std::string& error) {
    json scenarios = json::object();
    for (const auto& [id, run] : done) scenarios[id] = scenario_run_to_json(run);
    json j{{"schema", kCheckpointSchema}, {"error", error}, {"scenarios", scenarios}};
    std::ofstream out(checkpoint_path(cfg));
    out << j.dump(2) << "\n";
}

std::string format_metric(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return buf;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, bool resume) {
    if (cfg.out_dir.empty()) throw HarnessError("missing-out-dir", "out_dir is required");
    std::vector<LoadedScenario> scenarios = load_all(cfg);
    PolicyFactory make_policy = make_policy_factory(cfg);

    fs::create_directories(cfg.out_dir);
    {
        std::ofstream out(fs::path(cfg.out_dir) / "config.json");
        out << run_config_to_json(cfg).dump(2) << "\n";
    }

    std::map<std::string, ScenarioRun> completed;
    if (resume) completed = load_checkpoint(cfg);
    const std::size_t resumed = completed.size();

    std::vector<std::optional<ScenarioRun>> results(scenarios.size());
    std::atomic<size_t> next{0};
    std::mutex mu;
    std::exception_ptr failure;
    bool transport_failure = false;
    std::string failure_text;

    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (failure) return;
                auto it = completed.find(scenarios[i].scenario.id);
                if (it != completed.end()) {
                    results[i] = it->second;
                    continue;
                }
            }
            try {
                auto policy = make_policy();
                ScenarioRun run =
                    run_scenario(scenarios[i].scenario, cfg.policy, cfg.seed, *policy);
                std::lock_guard<std::mutex> lock(mu);
                results[i] = std::move(run);
            } catch (const llm::LlmError& e) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                    transport_failure = true;
                    failure_text = e.what();
                }
                return;
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int threads = std::max(1, cfg.parallelism);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (failure) {
        if (transport_failure) {
            std::map<std::string, ScenarioRun> done = std::move(completed);
            for (size_t i = 0; i < scenarios.size(); ++i) {
                if (results[i]) done[scenarios[i].scenario.id] = std::move(*results[i]);
            }
            write_checkpoint(cfg, done, failure_text);
            throw HarnessError("run-interrupted",
                               failure_text + "; checkpoint holds " +
                                   std::to_string(done.size()) + " finished scenarios, rerun "
                                   "with resume to continue");
        }
        std::rethrow_exception(failure);
    }

    std::vector<TranscriptEvent> events;
    std::vector<ItemOutcome> outcomes;
    for (auto& slot : results) {
        for (auto& e : slot->events) events.push_back(std::move(e));
        for (auto& o : slot->outcomes) outcomes.push_back(std::move(o));
    }
    for (size_t i = 0; i < events.size(); ++i) events[i].seq = i + 1;

    std::vector<ItemOutcome> scored = outcomes;
    if (cfg.soft_only)
        std::erase_if(scored, [](const ItemOutcome& o) { return o.hard; });

    MetricsReport report = compute_report(scored, events);

    write_transcript((fs::path(cfg.out_dir) / "transcripts.jsonl").string(), events);
    write_outcomes((fs::path(cfg.out_dir) / "outcomes.json").string(), outcomes);
    write_report((fs::path(cfg.out_dir) / "report.json").string(), report);
    std::error_code ec;
    fs::remove(checkpoint_path(cfg), ec);

    return RunResult{cfg.out_dir, std::move(report), scenarios.size(), resumed};
}

MetricsReport eval_run(const std::string& run_dir, bool soft_only) {
    std::vector<ItemOutcome> outcomes =
        read_outcomes((fs::path(run_dir) / "outcomes.json").string());
    std::vector<TranscriptEvent> events;
    const fs::path transcripts = fs::path(run_dir) / "transcripts.jsonl";
    if (fs::exists(transcripts)) events = read_transcript(transcripts.string());
    if (soft_only) std::erase_if(outcomes, [](const ItemOutcome& o) { return o.hard; });
    return compute_report(outcomes, events);
}

Comparison compare_runs(const MetricsReport& a, const MetricsReport& b) {
    if (a.scenario_ids != b.scenario_ids)
        throw HarnessError("scenario-mismatch",
                           "reports cover different scenario sets (" +
                               std::to_string(a.scenario_ids.size()) + " vs " +
                               std::to_string(b.scenario_ids.size()) + " ids)");

    auto opt = [](double v) { return std::optional<double>(v); };
    std::vector<std::pair<std::string, std::pair<std::optional<double>, std::optional<double>>>>
        metrics = {
            {"total_fidelity", {opt(a.total_fidelity), opt(b.total_fidelity)}},
            {"debate_hit_rate", {a.debate_hit_rate, b.debate_hit_rate}},
            {"debate_ratio", {opt(a.debate_ratio), opt(b.debate_ratio)}},
            {"high_w_hit", {opt(a.high_w_hit), opt(b.high_w_hit)}},
            {"s_total_raw", {opt(a.s_total_raw), opt(b.s_total_raw)}},
            {"s_total_per_case", {opt(a.s_total_per_case), opt(b.s_total_per_case)}},
            {"jain_mean", {a.jain_mean, b.jain_mean}},
        };
    auto tom_field = [](const std::optional<TomStats>& t,
                        auto pick) -> std::optional<double> {
        if (!t) return std::nullopt;
        return pick(*t);
    };
    metrics.emplace_back("tom_mae",
                         std::make_pair(tom_field(a.tom, [](const TomStats& t) { return t.mae; }),
                                        tom_field(b.tom, [](const TomStats& t) { return t.mae; })));
    metrics.emplace_back(
        "tom_acc1", std::make_pair(tom_field(a.tom, [](const TomStats& t) { return t.acc1; }),
                                   tom_field(b.tom, [](const TomStats& t) { return t.acc1; })));
    metrics.emplace_back(
        "tom_acc2", std::make_pair(tom_field(a.tom, [](const TomStats& t) { return t.acc2; }),
                                   tom_field(b.tom, [](const TomStats& t) { return t.acc2; })));

    Comparison cmp;
    std::ostringstream text;
    char line[160];
    std::snprintf(line, sizeof(line), "%-18s %10s %10s %10s %10s\n", "metric", "a", "b", "delta",
                  "pct");
    text << line;
    for (const auto& [name, pair] : metrics) {
        MetricDelta row;
        row.name = name;
        row.a = pair.first;
        row.b = pair.second;
        if (row.a && row.b) {
            row.delta = *row.b - *row.a;
            if (*row.a != 0.0) row.percent = 100.0 * (*row.b - *row.a) / std::abs(*row.a);
        }
        std::string pct = row.percent ? format_metric(row.percent) + "%" : "n/a";
        std::snprintf(line, sizeof(line), "%-18s %10s %10s %10s %10s\n", name.c_str(),
                      format_metric(row.a).c_str(), format_metric(row.b).c_str(),
                      format_metric(row.delta).c_str(), pct.c_str());
        text << line;
        cmp.rows.push_back(std::move(row));
    }
    cmp.text = text.str();
    return cmp;
}

}  // namespace mind
