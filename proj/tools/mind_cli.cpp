#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mind/forge.hpp"
#include "mind/harness.hpp"
#include "mind/llm/judge.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : "n/a"; }

void print_report(const mind::MetricsReport& r) {
    std::cout << "cases             " << r.cases << "\n"
              << "debate_cases      " << r.debate_cases << "\n"
              << "total_fidelity    " << fmt(r.total_fidelity) << "\n"
              << "debate_hit_rate   " << fmt_opt(r.debate_hit_rate) << "\n"
              << "debate_ratio      " << fmt(r.debate_ratio) << "\n"
              << "high_w_hit        " << fmt(r.high_w_hit) << "\n"
              << "s_total_raw       " << fmt(r.s_total_raw) << "\n"
              << "s_total_per_case  " << fmt(r.s_total_per_case) << "\n"
              << "jain_mean         " << fmt_opt(r.jain_mean) << "\n";
    if (r.tom) {
        std::cout << "tom               n=" << r.tom->n << " mae=" << fmt(r.tom->mae)
                  << " acc1=" << fmt(r.tom->acc1) << " acc2=" << fmt(r.tom->acc2)
                  << " pearson=" << fmt_opt(r.tom->pearson) << "\n";
    }
    for (const auto& [size, slice] : r.by_group_size) {
        std::cout << "group_size " << size << "     debate_ratio " << fmt(slice.debate_ratio)
                  << " (" << slice.debate_cases << "/" << slice.cases << ")\n";
    }
}

std::vector<std::string> collect_scenarios(const std::vector<std::string>& files,
                                           const std::string& dir) {
    std::vector<std::string> paths = files;
    if (!dir.empty()) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    return paths;
}

int cmd_forge(const std::string& pool_path, const std::string& out_dir, int group_size,
              int max_groups, std::uint64_t seed, double lambda, int preselect, int attempt_cap) {
    mind::PoolFile pool = mind::load_pool(pool_path);
    mind::CandidatePool candidates = mind::CandidatePool::build(pool.personas);
    if (preselect > 0 && static_cast<std::size_t>(preselect) < candidates.personas.size()) {
        auto ids = mind::mmr_select(candidates, mind::pool_centroid(candidates),
                                    static_cast<std::size_t>(preselect), lambda);
        std::set<std::string> keep(ids.begin(), ids.end());
        std::vector<mind::Persona> chosen;
        for (const auto& p : pool.personas)
            if (keep.count(p.id)) chosen.push_back(p);
        candidates = mind::CandidatePool::build(std::move(chosen));
    }
    mind::ForgeOptions opts;
    opts.group_size = group_size;
    opts.max_groups = max_groups;
    opts.seed = seed;
    opts.attempt_cap = attempt_cap;
    mind::ForgeResult result = mind::form_groups(candidates, pool.items, pool.trip, opts);

    fs::create_directories(out_dir);
    for (const auto& s : result.scenarios)
        mind::save_scenario(s, (fs::path(out_dir) / (s.id + ".json")).string());

    std::cout << "forged " << result.scenarios.size() << " scenarios in " << result.attempts
              << " attempts -> " << out_dir << "\n";
    for (const auto& [code, count] : result.rejections)
        std::cout << "  rejected " << count << " x " << code << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Negotiation protocol engine and simulation harness"};
    app.require_subcommand(1);

    // forge
    auto* forge = app.add_subcommand("forge", "Generate scenarios from a persona pool");
    std::string pool_path, forge_out;
    int group_size = 3, max_groups = 10, preselect = 0, attempt_cap = 10000;
    std::uint64_t forge_seed = 0;
    double lambda = 0.7;
    forge->add_option("--pool", pool_path, "Persona pool JSON")->required();
    forge->add_option("--out", forge_out, "Output directory")->required();
    forge->add_option("--group-size", group_size, "Personas per scenario");
    forge->add_option("--max-groups", max_groups, "Scenario count cap");
    forge->add_option("--seed", forge_seed, "Sampling seed");
    forge->add_option("--lambda", lambda, "Relevance/diversity balance for preselection");
    forge->add_option("--preselect", preselect, "Shortlist size before grouping (0 = all)");
    forge->add_option("--attempt-cap", attempt_cap, "Consecutive rejected samples before giving up");

    // run
    auto* run = app.add_subcommand("run", "Negotiate a scenario batch");
    std::string config_path, run_out, mode_s = "mind", backend_s = "rule", fixture, model,
                api_base, api_key_env, scenario_dir;
    std::vector<std::string> scenario_files;
    double tau = 0.75, eps = 0.0;
    int rounds = 3, parallelism = 1;
    std::uint64_t run_seed = 0;
    bool soft_only = false, resume = false;
    run->add_option("--config", config_path, "Run config JSON (flags override)");
    run->add_option("--scenario", scenario_files, "Scenario file (repeatable)");
    run->add_option("--scenario-dir", scenario_dir, "Directory of scenario JSON files");
    run->add_option("--mode", mode_s, "base | mind | tone-only | appraisal-only");
    run->add_option("--backend", backend_s, "rule | llm | fixture");
    run->add_option("--seed", run_seed, "Run seed");
    run->add_option("--tau", tau, "Consensus threshold");
    run->add_option("--rounds", rounds, "Max debate rounds");
    run->add_option("--eps", eps, "Tone noise probability");
    run->add_option("--out", run_out, "Run directory");
    run->add_option("--parallelism", parallelism, "Worker threads");
    run->add_flag("--soft-only", soft_only, "Score negotiated items only");
    run->add_option("--fixture", fixture, "Recorded responses for the fixture backend");
    run->add_option("--model", model, "Agent model identifier");
    run->add_option("--api-base", api_base, "Chat completion endpoint base URL");
    run->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
    run->add_flag("--resume", resume, "Continue from a checkpoint");

    // eval
    auto* eval = app.add_subcommand("eval", "Recompute metrics from a run directory");
    std::string eval_dir, eval_out;
    bool eval_soft = false;
    eval->add_option("--run", eval_dir, "Run directory")->required();
    eval->add_flag("--soft-only", eval_soft, "Score negotiated items only");
    eval->add_option("--out", eval_out, "Write the report JSON here");

    // compare
    auto* compare = app.add_subcommand("compare", "Delta two run reports");
    std::string report_a, report_b;
    bool compare_json = false;
    compare->add_option("--a", report_a, "First report.json")->required();
    compare->add_option("--b", report_b, "Second report.json")->required();
    compare->add_flag("--json", compare_json, "Emit JSON instead of a table");

    // judge
    auto* judge = app.add_subcommand("judge", "Pairwise judging of two run directories");
    std::string judge_a, judge_b, judge_backend = "fixture", judge_fixture, judge_model,
                judge_api_base = "https://api.openai.com", judge_key_env = "MIND_API_KEY",
                judge_out, label_a = "Plan A", label_b = "Plan B";
    judge->add_option("--a", judge_a, "First run directory")->required();
    judge->add_option("--b", judge_b, "Second run directory")->required();
    judge->add_option("--backend", judge_backend, "fixture | llm");
    judge->add_option("--fixture", judge_fixture, "Recorded judge responses");
    judge->add_option("--model", judge_model, "Judge model identifier");
    judge->add_option("--api-base", judge_api_base, "Chat completion endpoint base URL");
    judge->add_option("--api-key-env", judge_key_env, "Environment variable holding the API key");
    judge->add_option("--label-a", label_a, "Version label for the first run");
    judge->add_option("--label-b", label_b, "Version label for the second run");
    judge->add_option("--out", judge_out, "Write the verdict JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (forge->parsed()) {
            return cmd_forge(pool_path, forge_out, group_size, max_groups, forge_seed, lambda,
                             preselect, attempt_cap);
        }

        if (run->parsed()) {
            mind::RunConfig cfg;
            if (!config_path.empty()) cfg = mind::load_run_config(config_path);
            if (run->count("--mode")) cfg.policy.mode = mind::mode_from_name(mode_s);
            if (run->count("--backend")) cfg.backend = mind::backend_from_name(backend_s);
            if (run->count("--seed")) cfg.seed = run_seed;
            if (run->count("--tau")) cfg.policy.tau = tau;
            if (run->count("--rounds")) cfg.policy.max_rounds = rounds;
            if (run->count("--eps")) cfg.policy.tone_noise_eps = eps;
            if (run->count("--out")) cfg.out_dir = run_out;
            if (run->count("--parallelism")) cfg.parallelism = parallelism;
            if (run->count("--soft-only")) cfg.soft_only = soft_only;
            if (run->count("--fixture")) cfg.fixture_path = fixture;
            if (run->count("--model")) cfg.model = model;
            if (run->count("--api-base")) cfg.api_base = api_base;
            if (run->count("--api-key-env")) cfg.api_key_env = api_key_env;
            auto paths = collect_scenarios(scenario_files, scenario_dir);
            if (!paths.empty()) cfg.scenario_paths = paths;

            mind::RunResult result = mind::run_experiment(cfg, resume);
            std::cout << "ran " << result.scenarios << " scenarios";
            if (result.resumed) std::cout << " (" << result.resumed << " from checkpoint)";
            std::cout << " -> " << result.out_dir << "\n";
            print_report(result.report);
            return 0;
        }

        if (eval->parsed()) {
            mind::MetricsReport report = mind::eval_run(eval_dir, eval_soft);
            if (!eval_out.empty()) {
                mind::write_report(eval_out, report);
                std::cout << "report -> " << eval_out << "\n";
            }
            print_report(report);
            return 0;
        }

        if (compare->parsed()) {
            mind::MetricsReport a = mind::read_report(report_a);
            mind::MetricsReport b = mind::read_report(report_b);
            mind::Comparison cmp = mind::compare_runs(a, b);
            if (compare_json) {
                json rows = json::array();
                for (const auto& row : cmp.rows) {
                    json r{{"metric", row.name}};
                    r["a"] = row.a ? json(*row.a) : json();
                    r["b"] = row.b ? json(*row.b) : json();
                    r["delta"] = row.delta ? json(*row.delta) : json();
                    r["percent"] = row.percent ? json(*row.percent) : json();
                    rows.push_back(std::move(r));
                }
                std::cout << rows.dump(2) << "\n";
            } else {
                std::cout << cmp.text;
            }
            return 0;
        }

        if (judge->parsed()) {
            auto load_plan = [](const std::string& dir, const std::string& label) {
                auto events = mind::read_transcript((fs::path(dir) / "transcripts.jsonl").string());
                auto outcomes = mind::read_outcomes((fs::path(dir) / "outcomes.json").string());
                return mind::llm::summarize_plan(label, events, outcomes);
            };
            mind::llm::PlanSummary plan_a = load_plan(judge_a, label_a);
            mind::llm::PlanSummary plan_b = load_plan(judge_b, label_b);

            std::shared_ptr<mind::llm::Transport> transport;
            if (judge_backend == "fixture") {
                if (judge_fixture.empty())
                    throw mind::HarnessError("bad-config", "judge fixture backend needs --fixture");
                transport = mind::llm::FixtureTransport::replay(judge_fixture);
            } else if (judge_backend == "llm") {
                const char* key = std::getenv(judge_key_env.c_str());
                if (!key || !*key) throw mind::HarnessError("missing-credential", judge_key_env);
                mind::llm::HttpTransport::Options topts;
                topts.base_url = judge_api_base;
                topts.api_key = key;
                transport = std::make_shared<mind::llm::HttpTransport>(std::move(topts));
            } else {
                throw mind::HarnessError("bad-config", "judge backend must be fixture or llm");
            }
            mind::llm::LlmClient client(transport);
            mind::llm::JudgeOptions jopts;
            if (!judge_model.empty()) jopts.model = judge_model;
            mind::llm::PairJudgement verdict = mind::llm::judge_pair(client, plan_a, plan_b, jopts);

            if (!verdict.evaluated) {
                std::cerr << "pair unevaluated: " << verdict.error << "\n";
                return 1;
            }
            json out{{"a", label_a}, {"b", label_b}};
            for (size_t i = 0; i < mind::llm::kJudgeCriteria.size(); ++i) {
                const std::string name(mind::llm::kJudgeCriteria[i]);
                const std::string winner(mind::llm::judge_winner_name(verdict.criteria[i]));
                out[name] = winner;
                std::cout << name << ": " << winner << "\n";
            }
            out["overall"] = std::string(mind::llm::judge_winner_name(verdict.overall));
            std::cout << "overall: " << mind::llm::judge_winner_name(verdict.overall) << "\n";
            if (!judge_out.empty()) {
                std::ofstream f(judge_out);
                f << out.dump(2) << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
