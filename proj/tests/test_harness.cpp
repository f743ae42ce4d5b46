#include <doctest.h>

#include <filesystem>
#include <memory>

#include "helpers.hpp"
#include "mind/engine.hpp"
#include "mind/harness.hpp"
#include "mind/llm/agent.hpp"
#include "mind/llm/client.hpp"
#include "mind/metrics.hpp"

using namespace mind;
using namespace mind::test;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kScenarioFiles = {
    "ambiance-update.json", "nonsmoking-consensus.json", "price-deadlock.json",
    "rating-compromise.json", "review-switch.json"};

std::vector<std::string> shipped_scenarios() {
    std::vector<std::string> paths;
    for (const auto& name : kScenarioFiles) paths.push_back(repo_path("data/scenarios/" + name));
    return paths;
}

RunConfig rule_config(const std::string& out_dir, std::uint64_t seed = 102) {
    RunConfig cfg;
    cfg.policy.mode = Mode::Mind;
    cfg.backend = Backend::Rule;
    cfg.seed = seed;
    cfg.scenario_paths = shipped_scenarios();
    cfg.out_dir = out_dir;
    return cfg;
}

class ConstTransport : public llm::Transport {
  public:
    explicit ConstTransport(std::string text) : text_(std::move(text)) {}
    std::string complete(const llm::ChatRequest&) override { return text_; }

  private:
    std::string text_;
};

// Runs the given scenarios through the model-backed policy while recording
// every request/response pair into the fixture file. The canned reply is never
// parseable, so each turn exercises the re-ask and then the rule fallback.
void record_fixture(const std::string& fixture, const RunConfig& cfg,
                    const std::vector<std::string>& scenario_paths) {
    auto inner = std::make_shared<ConstTransport>("unusable");
    auto client =
        std::make_shared<llm::LlmClient>(llm::FixtureTransport::record(fixture, inner));
    for (const auto& path : scenario_paths) {
        Scenario s = load_scenario(path);
        llm::LlmPolicyOptions opts;
        opts.model = cfg.model;
        llm::LlmPolicy policy(client, opts);
        run_scenario(s, cfg.policy, cfg.seed, policy);
    }
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    return read_file(a.string()) == read_file(b.string());
}

}  // namespace

TEST_CASE("run configs round trip through json and files") {
    RunConfig cfg = rule_config("/tmp/nowhere");
    cfg.policy.mode = Mode::ToneOnly;
    cfg.policy.tone_noise_eps = 0.25;
    cfg.policy.tau = 0.8;
    cfg.policy.max_rounds = 4;
    cfg.backend = Backend::Fixture;
    cfg.parallelism = 3;
    cfg.soft_only = true;
    cfg.fixture_path = "fixtures/run.jsonl";
    cfg.model = "some-model";
    cfg.api_base = "https://example.test";
    cfg.api_key_env = "OTHER_KEY";

    json j = run_config_to_json(cfg);
    CHECK(j["schema"] == "mind-config/1");
    RunConfig back = run_config_from_json(j);
    CHECK(back.policy.mode == Mode::ToneOnly);
    CHECK(back.policy.tone_noise_eps == 0.25);
    CHECK(back.policy.tau == 0.8);
    CHECK(back.policy.max_rounds == 4);
    CHECK(back.backend == Backend::Fixture);
    CHECK(back.seed == 102);
    CHECK(back.scenario_paths == cfg.scenario_paths);
    CHECK(back.out_dir == "/tmp/nowhere");
    CHECK(back.parallelism == 3);
    CHECK(back.soft_only);
    CHECK(back.fixture_path == "fixtures/run.jsonl");
    CHECK(back.model == "some-model");
    CHECK(back.api_base == "https://example.test");
    CHECK(back.api_key_env == "OTHER_KEY");

    auto dir = fresh_temp_dir("harness-config");
    auto path = (dir / "config.json").string();
    {
        std::ofstream out(path);
        out << j.dump(2);
    }
    RunConfig loaded = load_run_config(path);
    CHECK(loaded.model == "some-model");
    CHECK(loaded.scenario_paths.size() == 5);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config validation rejects broken settings") {
    auto expect_code = [](json j, const std::string& code) {
        try {
            run_config_from_json(j);
            CHECK(false);
        } catch (const ParseError& e) {
            CHECK(e.code() == code);
        }
    };
    json good = run_config_to_json(rule_config("/tmp/x"));

    json bad_tau = good;
    bad_tau["tau"] = 0.0;
    expect_code(bad_tau, "bad-config");
    bad_tau["tau"] = 1.5;
    expect_code(bad_tau, "bad-config");

    json bad_rounds = good;
    bad_rounds["rounds"] = 0;
    expect_code(bad_rounds, "bad-config");

    json bare_fixture = good;
    bare_fixture["backend"] = "fixture";
    bare_fixture["fixture_path"] = "";
    expect_code(bare_fixture, "bad-config");

    json bad_schema = good;
    bad_schema["schema"] = "mind-config/9";
    expect_code(bad_schema, "schema-mismatch");

    json bad_backend = good;
    bad_backend["backend"] = "quantum";
    expect_code(bad_backend, "bad-backend");

    CHECK_THROWS_AS(load_run_config("/definitely/not/here.json"), ParseError);
}

TEST_CASE("a rule-backend run writes the golden outputs deterministically") {
    auto dir = fresh_temp_dir("harness-run");
    auto out_a = (dir / "a").string();
    auto out_b = (dir / "b").string();

    RunResult a = run_experiment(rule_config(out_a));
    CHECK(a.out_dir == out_a);
    CHECK(a.scenarios == 5);
    CHECK(a.resumed == 0);
    for (const char* name : {"config.json", "transcripts.jsonl", "outcomes.json", "report.json"})
        CHECK(fs::exists(fs::path(out_a) / name));
    CHECK_FALSE(fs::exists(fs::path(out_a) / "checkpoint.json"));

    RunResult b = run_experiment(rule_config(out_b));
    for (const char* name : {"transcripts.jsonl", "outcomes.json", "report.json"})
        CHECK(same_bytes(fs::path(out_a) / name, fs::path(out_b) / name));

    SUBCASE("outputs match the checked-in reference run") {
        CHECK(same_bytes(fs::path(out_a) / "transcripts.jsonl",
                         repo_path("tests/golden/transcripts.jsonl")));
        CHECK(same_bytes(fs::path(out_a) / "outcomes.json",
                         repo_path("tests/golden/outcomes.json")));
        CHECK(same_bytes(fs::path(out_a) / "report.json", repo_path("tests/golden/report.json")));
    }
    SUBCASE("the returned report matches the file on disk") {
        MetricsReport from_file = read_report((fs::path(out_a) / "report.json").string());
        CHECK(report_to_json(a.report) == report_to_json(from_file));
    }
    SUBCASE("a parallel run produces the same bytes") {
        auto out_c = (dir / "c").string();
        RunConfig cfg = rule_config(out_c);
        cfg.parallelism = 2;
        run_experiment(cfg);
        for (const char* name : {"transcripts.jsonl", "outcomes.json", "report.json"})
            CHECK(same_bytes(fs::path(out_a) / name, fs::path(out_c) / name));
    }
    SUBCASE("eval recomputes the stored report") {
        MetricsReport again = eval_run(out_a);
        CHECK(report_to_json(again) == report_to_json(a.report));
    }
    SUBCASE("soft-only scoring drops settled hard items from the report only") {
        MetricsReport soft = eval_run(out_a, true);
        CHECK(soft.cases == 20);           // five hard city locks excluded
        CHECK(a.report.cases == 25);

        auto out_d = (dir / "d").string();
        RunConfig cfg = rule_config(out_d);
        cfg.soft_only = true;
        RunResult d = run_experiment(cfg);
        CHECK(d.report.cases == 20);
        CHECK(read_outcomes((fs::path(out_d) / "outcomes.json").string()).size() == 25);
        CHECK(report_to_json(d.report) == report_to_json(soft));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("runs refuse bad inputs before writing anything") {
    auto dir = fresh_temp_dir("harness-bad");

    SUBCASE("an invalid scenario aborts with its violations") {
        Scenario s = valid_three_persona_scenario("sofa");
        s.personas.pop_back();  // two of the three conflicts collapse
        auto bad_path = (dir / "bad.json").string();
        save_scenario(s, bad_path);

        RunConfig cfg = rule_config((dir / "never").string());
        cfg.scenario_paths = {bad_path};
        try {
            run_experiment(cfg);
            CHECK(false);
        } catch (const HarnessError& e) {
            CHECK(e.code() == "invalid-scenario");
            CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
        }
        CHECK_FALSE(fs::exists(dir / "never"));
    }
    SUBCASE("duplicate scenario ids are rejected") {
        RunConfig cfg = rule_config((dir / "never").string());
        cfg.scenario_paths.push_back(cfg.scenario_paths.front());
        try {
            run_experiment(cfg);
            CHECK(false);
        } catch (const HarnessError& e) {
            CHECK(e.code() == "duplicate-scenario");
        }
        CHECK_FALSE(fs::exists(dir / "never"));
    }
    SUBCASE("an empty scenario list is an error") {
        RunConfig cfg = rule_config((dir / "never").string());
        cfg.scenario_paths.clear();
        CHECK_THROWS_AS(run_experiment(cfg), HarnessError);
    }
    SUBCASE("a missing out dir is an error") {
        RunConfig cfg = rule_config("");
        CHECK_THROWS_AS(run_experiment(cfg), HarnessError);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("comparisons line up metric deltas") {
    MetricsReport a;
    a.cases = 4;
    a.debate_cases = 2;
    a.total_fidelity = 0.5;
    a.debate_hit_rate = 0.5;
    a.debate_ratio = 0.5;
    a.high_w_hit = 0.5;
    a.s_total_raw = 10.0;
    a.s_total_per_case = 2.5;
    a.jain_mean = 0.9;
    a.scenario_ids = {"g1"};

    MetricsReport b = a;
    b.total_fidelity = 0.75;
    b.s_total_raw = 12.0;

    Comparison cmp = compare_runs(a, b);
    REQUIRE(cmp.rows.size() == 10);
    CHECK(cmp.rows[0].name == "total_fidelity");
    CHECK(cmp.rows[0].delta.value() == doctest::Approx(0.25));
    CHECK(cmp.rows[0].percent.value() == doctest::Approx(50.0));
    CHECK(cmp.rows[4].name == "s_total_raw");
    CHECK(cmp.rows[4].delta.value() == doctest::Approx(2.0));

    // ToM was absent on both sides: no values, no deltas, "n/a" in the table.
    CHECK(cmp.rows[7].name == "tom_mae");
    CHECK_FALSE(cmp.rows[7].a.has_value());
    CHECK_FALSE(cmp.rows[7].delta.has_value());
    CHECK(cmp.text.find("metric") != std::string::npos);
    CHECK(cmp.text.find("n/a") != std::string::npos);
    CHECK(cmp.text.find("total_fidelity") != std::string::npos);

    SUBCASE("a zero baseline suppresses the percent column") {
        MetricsReport zero = a;
        zero.total_fidelity = 0.0;
        Comparison c2 = compare_runs(zero, b);
        CHECK(c2.rows[0].delta.value() == doctest::Approx(0.75));
        CHECK_FALSE(c2.rows[0].percent.has_value());
    }
    SUBCASE("different scenario sets refuse to compare") {
        MetricsReport other = a;
        other.scenario_ids = {"g1", "g2"};
        try {
            compare_runs(a, other);
            CHECK(false);
        } catch (const HarnessError& e) {
            CHECK(e.code() == "scenario-mismatch");
        }
    }
    SUBCASE("identical reports have all-zero deltas") {
        Comparison same = compare_runs(a, a);
        for (const MetricDelta& row : same.rows)
            if (row.delta) CHECK(*row.delta == doctest::Approx(0.0));
    }
}

TEST_CASE("a fixture backend replays recorded traffic to the same outcomes") {
    auto dir = fresh_temp_dir("harness-fixture");
    auto fixture = (dir / "fx.jsonl").string();

    RunConfig fix_cfg = rule_config((dir / "llm-run").string());
    fix_cfg.backend = Backend::Fixture;
    fix_cfg.fixture_path = fixture;

    record_fixture(fixture, fix_cfg, fix_cfg.scenario_paths);

    RunResult fixture_run = run_experiment(fix_cfg);
    CHECK(fixture_run.scenarios == 5);

    auto rule_dir = (dir / "rule-run").string();
    run_experiment(rule_config(rule_dir));

    // Every model reply was unusable, so the rule policy drove every turn:
    // outcomes and report match the pure rule backend byte for byte.
    CHECK(same_bytes(fs::path(fix_cfg.out_dir) / "outcomes.json",
                     fs::path(rule_dir) / "outcomes.json"));
    CHECK(same_bytes(fs::path(fix_cfg.out_dir) / "report.json",
                     fs::path(rule_dir) / "report.json"));

    // The transcript additionally records each discarded reply as a hidden
    // degradation note.
    std::string transcript = read_file((fs::path(fix_cfg.out_dir) / "transcripts.jsonl").string());
    CHECK(transcript.find("degradation") != std::string::npos);
    CHECK(transcript.find("rule policy supplied this turn") != std::string::npos);

    SUBCASE("replaying the fixture is deterministic") {
        RunConfig again = fix_cfg;
        again.out_dir = (dir / "llm-run-2").string();
        run_experiment(again);
        for (const char* name : {"transcripts.jsonl", "outcomes.json", "report.json"})
            CHECK(same_bytes(fs::path(fix_cfg.out_dir) / name, fs::path(again.out_dir) / name));
    }
    SUBCASE("a missing fixture file fails before writing output") {
        RunConfig missing = fix_cfg;
        missing.fixture_path = (dir / "absent.jsonl").string();
        missing.out_dir = (dir / "never").string();
        CHECK_THROWS_AS(run_experiment(missing), llm::LlmError);
        CHECK_FALSE(fs::exists(dir / "never"));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("a transport failure checkpoints and the rerun resumes") {
    auto dir = fresh_temp_dir("harness-resume");
    auto fixture = (dir / "fx.jsonl").string();
    auto paths = shipped_scenarios();  // sorted order: ambiance-update first

    RunConfig cfg = rule_config((dir / "run").string());
    cfg.backend = Backend::Fixture;
    cfg.fixture_path = fixture;

    // The fixture only covers the first scenario; the second one misses.
    record_fixture(fixture, cfg, {paths[0]});

    try {
        run_experiment(cfg);
        CHECK(false);
    } catch (const HarnessError& e) {
        CHECK(e.code() == "run-interrupted");
        CHECK(std::string(e.what()).find("fixture-miss") != std::string::npos);
        CHECK(std::string(e.what()).find("checkpoint holds 1 finished scenarios") !=
              std::string::npos);
        CHECK(std::string(e.what()).find("rerun with resume to continue") != std::string::npos);
    }

    auto checkpoint = fs::path(cfg.out_dir) / "checkpoint.json";
    REQUIRE(fs::exists(checkpoint));
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "transcripts.jsonl"));
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "outcomes.json"));
    json cp = json::parse(read_file(checkpoint.string()));
    CHECK(cp["schema"] == "mind-checkpoint/1");
    CHECK(cp["error"].get<std::string>().find("fixture-miss") != std::string::npos);
    REQUIRE(cp["scenarios"].size() == 1);
    CHECK(cp["scenarios"].contains("ambiance-update"));

    // Record the remaining four scenarios; recording appends to the file.
    record_fixture(fixture, cfg, {paths[1], paths[2], paths[3], paths[4]});

    RunResult resumed = run_experiment(cfg, true);
    CHECK(resumed.resumed == 1);
    CHECK(resumed.scenarios == 5);
    CHECK_FALSE(fs::exists(checkpoint));

    // An uninterrupted run over the completed fixture produces the same bytes.
    RunConfig whole = cfg;
    whole.out_dir = (dir / "whole").string();
    run_experiment(whole);
    for (const char* name : {"transcripts.jsonl", "outcomes.json", "report.json"})
        CHECK(same_bytes(fs::path(cfg.out_dir) / name, fs::path(whole.out_dir) / name));

    std::filesystem::remove_all(dir);
}
