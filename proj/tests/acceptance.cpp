// Acceptance gate: eight end-to-end checks over the negotiation engine,
// metrics, and judging stack. Each check prints one [PASS]/[FAIL] line; the
// process exits nonzero when any check fails.

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mind/domain.hpp"
#include "mind/engine.hpp"
#include "mind/harness.hpp"
#include "mind/llm/client.hpp"
#include "mind/llm/judge.hpp"
#include "mind/llm/parser.hpp"
#include "mind/metrics.hpp"
#include "mind/rng.hpp"

using namespace mind;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-9;

std::string repo_path(const std::string& relative) {
    return std::string(MIND_REPO_DIR) + "/" + relative;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path fresh_dir(const std::string& label) {
    std::random_device rd;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%08x%08x", rd(), rd());
    fs::path dir = fs::temp_directory_path() / ("mind-acc-" + label + "-" + buf);
    fs::create_directories(dir);
    return dir;
}

using Problems = std::vector<std::string>;

void expect(Problems& problems, bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
}

void expect_near(Problems& problems, double got, double want, const std::string& what,
                 double tol = kTol) {
    if (!(std::abs(got - want) <= tol))
        problems.push_back(what + ": got " + std::to_string(got) + ", want " +
                           std::to_string(want));
}

RunConfig golden_config(const std::string& out_dir) {
    RunConfig cfg;
    cfg.policy.mode = Mode::Mind;
    cfg.backend = Backend::Rule;
    cfg.seed = 102;
    for (const char* name : {"ambiance-update.json", "nonsmoking-consensus.json",
                             "price-deadlock.json", "rating-compromise.json",
                             "review-switch.json"})
        cfg.scenario_paths.push_back(repo_path(std::string("data/scenarios/") + name));
    cfg.out_dir = out_dir;
    return cfg;
}

// Event lookup helpers over one run's full transcript.
struct Trace {
    std::vector<TranscriptEvent> events;
    std::vector<ItemOutcome> outcomes;

    const ItemOutcome* outcome(const std::string& scenario, const std::string& item) const {
        for (const auto& o : outcomes)
            if (o.scenario_id == scenario && o.item_key == item) return &o;
        return nullptr;
    }
    std::vector<const TranscriptEvent*> find(const std::string& scenario, const std::string& item,
                                             EventKind kind) const {
        std::vector<const TranscriptEvent*> out;
        for (const auto& e : events)
            if (e.scenario_id == scenario && e.item_key == item && e.kind == kind)
                out.push_back(&e);
        return out;
    }
    const TranscriptEvent* event_of(const std::string& scenario, const std::string& item,
                                    EventKind kind, const std::string& actor, int round) const {
        for (const auto* e : find(scenario, item, kind))
            if (e->actor == actor && e->round == round) return e;
        return nullptr;
    }
};

std::string strategy_of(const Trace& t, const std::string& scenario, const std::string& item,
                        const std::string& actor, int round) {
    const TranscriptEvent* e = t.event_of(scenario, item, EventKind::Appraisal, actor, round);
    return e ? e->payload.value("strategy", "") : "<missing>";
}

std::string vote_of(const Trace& t, const std::string& scenario, const std::string& item,
                    const std::string& actor, int round) {
    const TranscriptEvent* e = t.event_of(scenario, item, EventKind::Vote, actor, round);
    return e ? e->payload.value("vote", "") : "<missing>";
}

std::string action_of(const Trace& t, const std::string& scenario, const std::string& item,
                      const std::string& actor, int round, std::string* new_value = nullptr) {
    const TranscriptEvent* e = t.event_of(scenario, item, EventKind::ProposerAction, actor, round);
    if (!e) return "<missing>";
    if (new_value) *new_value = e->payload.value("new_value", "");
    return e->payload.value("action", "");
}

// ---------------------------------------------------------------------------
// 1. Golden traces

void check_golden_traces(Problems& problems) {
    auto dir = fresh_dir("golden");
    RunConfig cfg = golden_config((dir / "run").string());

    auto t0 = std::chrono::steady_clock::now();
    run_experiment(cfg);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const char* name : {"transcripts.jsonl", "outcomes.json", "report.json"}) {
        std::string got = read_file((fs::path(cfg.out_dir) / name).string());
        std::string want = read_file(repo_path(std::string("tests/golden/") + name));
        expect(problems, !want.empty(), std::string("reference file missing: ") + name);
        expect(problems, got == want, std::string("replay diverges from tests/golden/") + name);
    }

    Trace t;
    t.events = read_transcript((fs::path(cfg.out_dir) / "transcripts.jsonl").string());
    t.outcomes = read_outcomes((fs::path(cfg.out_dir) / "outcomes.json").string());

    // Scenario 1: unanimous strict defence, consensus in round 1.
    {
        const auto* o = t.outcome("nonsmoking-consensus", "room__smoking");
        expect(problems, o && !o->resolution.fallback && o->resolution.round == 1 &&
                             o->final_value == "Non-smoking" && o->proposer == "ana",
               "scenario 1 should settle on Non-smoking in round 1 with ana proposing");
        expect(problems,
               strategy_of(t, "nonsmoking-consensus", "room__smoking", "ben", 1) == "accept",
               "scenario 1: ben should appraise accept");
        expect(problems,
               strategy_of(t, "nonsmoking-consensus", "room__smoking", "cleo", 1) == "yield",
               "scenario 1: cleo should appraise yield");
        expect(problems, vote_of(t, "nonsmoking-consensus", "room__smoking", "cleo", 1) == "agree",
               "scenario 1: cleo should agree in round 1");
    }
    // Scenario 2: proposer adopts the louder dissent, consensus in round 2.
    {
        const auto* o = t.outcome("ambiance-update", "restaurant__ambiance");
        expect(problems, o && !o->resolution.fallback && o->resolution.round == 2 &&
                             o->final_value == "Casual",
               "scenario 2 should settle on Casual in round 2");
        std::string revised;
        expect(problems,
               action_of(t, "ambiance-update", "restaurant__ambiance", "dora", 1, &revised) ==
                       "update" &&
                   revised == "Casual",
               "scenario 2: dora should update to Casual after round 1");
    }
    // Scenario 3: stepwise ordinal concessions landing on 3.5 in round 3.
    {
        const auto* o = t.outcome("rating-compromise", "hotel__rating");
        expect(problems,
               o && !o->resolution.fallback && o->resolution.round == 3 && o->final_value == "3.5",
               "scenario 3 should settle on 3.5 in round 3");
        std::string v1, v2;
        expect(problems,
               action_of(t, "rating-compromise", "hotel__rating", "gus", 1, &v1) == "compromise" &&
                   v1 == "4.0",
               "scenario 3: gus should move to 4.0 after round 1");
        expect(problems,
               action_of(t, "rating-compromise", "hotel__rating", "gus", 2, &v2) == "update" &&
                   v2 == "3.5",
               "scenario 3: gus should adopt 3.5 after round 2");
    }
    // Scenario 4: deadlock, then fallback to the w=8 holder's value.
    {
        const auto* o = t.outcome("price-deadlock", "restaurant__price");
        expect(problems, o && o->resolution.fallback && o->final_value == "Budget",
               "scenario 4 should fall back to Budget");
        expect(problems, o && o->top_agents == std::vector<std::string>{"kai"},
               "scenario 4: kai holds the top weight");
        for (int round : {1, 2})
            expect(problems,
                   action_of(t, "price-deadlock", "restaurant__price", "jon", round) == "keep",
                   "scenario 4: jon should keep in round " + std::to_string(round));
        for (int round : {1, 2, 3})
            expect(problems,
                   vote_of(t, "price-deadlock", "restaurant__price", "kai", round) == "disagree",
                   "scenario 4: kai should disagree in round " + std::to_string(round));
    }
    // Scenario 5: a voter flips from disagree to agree in round 2.
    {
        const auto* o = t.outcome("review-switch", "hotel__rating");
        expect(problems,
               o && !o->resolution.fallback && o->resolution.round == 2 && o->final_value == "4.0",
               "scenario 5 should settle on 4.0 in round 2");
        expect(problems, vote_of(t, "review-switch", "hotel__rating", "oren", 1) == "disagree",
               "scenario 5: oren should disagree in round 1");
        expect(problems, vote_of(t, "review-switch", "hotel__rating", "oren", 2) == "agree",
               "scenario 5: oren should agree in round 2");
    }

    expect(problems, seconds < 1.0,
           "replay took " + std::to_string(seconds) + "s, budget is 1s");
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// 2. Metric oracle equivalence

struct OracleCase {
    std::string item;
    bool fallback;
    // per agent: weight, matched
    std::vector<std::pair<int, bool>> agents;
};

ItemOutcome oracle_outcome(const OracleCase& c) {
    ItemOutcome o;
    o.scenario_id = "oracle-group";
    o.item_key = c.item;
    o.final_value = "F";
    o.resolution.fallback = c.fallback;
    o.resolution.round = c.fallback ? 0 : 1;
    o.proposer = "a0";
    int top = 0;
    for (const auto& [w, matched] : c.agents) top = std::max(top, w);
    for (size_t i = 0; i < c.agents.size(); ++i) {
        AgentOutcome a;
        a.id = "a" + std::to_string(i);
        a.w = c.agents[i].first;
        a.matched = c.agents[i].second;
        a.initial_value = a.matched ? "F" : "X";
        o.agents.push_back(a);
        if (a.w == top) o.top_agents.push_back(a.id);
    }
    return o;
}

void check_metric_oracle(Problems& problems) {
    // Hand-built fixture: one 3-agent group debating 5 items (two fallbacks).
    std::vector<OracleCase> cases = {
        {"k__i1", false, {{7, true}, {3, true}, {2, false}}},
        {"k__i2", false, {{5, false}, {5, true}, {1, true}}},
        {"k__i3", true, {{9, true}, {8, false}, {2, false}}},
        {"k__i4", false, {{4, false}, {6, false}, {6, false}}},
        {"k__i5", true, {{2, false}, {10, true}, {4, true}}},
    };
    std::vector<ItemOutcome> outcomes;
    for (const auto& c : cases) outcomes.push_back(oracle_outcome(c));

    // Independent brute-force recomputation from the raw case table.
    double f_sum = 0.0;
    size_t debate = 0, debate_hits = 0, hits = 0;
    double s_raw = 0.0;
    std::vector<double> per_agent(3, 0.0);
    for (const auto& c : cases) {
        int matched = 0, top_w = 0;
        for (const auto& [w, m] : c.agents) top_w = std::max(top_w, w);
        bool top_matched = false;
        for (size_t i = 0; i < c.agents.size(); ++i) {
            const auto& [w, m] = c.agents[i];
            if (m) {
                ++matched;
                s_raw += w;
                per_agent[i] += w;
            }
            if (w == top_w && m) top_matched = true;
        }
        f_sum += double(matched) / double(c.agents.size());
        if (!c.fallback) {
            ++debate;
            if (top_matched) ++debate_hits;
        }
        if (top_matched) ++hits;
    }
    double want_f = f_sum / cases.size();
    double want_dhr = double(debate_hits) / double(debate);
    double want_dr = double(debate) / cases.size();
    double want_hwh = double(hits) / cases.size();
    double want_per_case = s_raw / cases.size();
    double sum = per_agent[0] + per_agent[1] + per_agent[2];
    double sq = per_agent[0] * per_agent[0] + per_agent[1] * per_agent[1] +
                per_agent[2] * per_agent[2];
    double want_jain = sum * sum / (3.0 * sq);

    expect_near(problems, total_fidelity(outcomes), want_f, "fidelity");
    expect(problems, debate_hit_rate(outcomes).has_value(), "debate hit rate should exist");
    expect_near(problems, debate_hit_rate(outcomes).value_or(-1), want_dhr, "debate hit rate");
    expect_near(problems, debate_ratio(outcomes), want_dr, "debate ratio");
    expect_near(problems, high_w_hit(outcomes), want_hwh, "high-weight hit");
    Satisfaction s = total_satisfaction(outcomes);
    expect_near(problems, s.raw, s_raw, "satisfaction raw");
    expect_near(problems, s.per_case, want_per_case, "satisfaction per case");
    expect(problems, jain_mean(outcomes).has_value(), "jain mean should exist");
    expect_near(problems, jain_mean(outcomes).value_or(-1), want_jain, "jain mean");

    MetricsReport report = compute_report(outcomes, {});
    expect_near(problems, report.total_fidelity, want_f, "report fidelity");
    expect_near(problems, report.high_w_hit, want_hwh, "report high-weight hit");
    expect_near(problems, report.s_total_raw, s_raw, "report satisfaction");

    // The three worked fairness values: even split, single scorer, 4-vs-2.
    expect_near(problems, jain_fairness({5.0, 5.0, 5.0}).value_or(-1), 1.0, "jain all-even");
    expect_near(problems, jain_fairness({7.0, 0.0, 0.0}).value_or(-1), 1.0 / 3.0,
                "jain one-scorer");
    expect_near(problems, jain_fairness({4.0, 2.0}).value_or(-1), 0.9, "jain 4-vs-2");
}

// ---------------------------------------------------------------------------
// 3. Tone round-trip bound

void check_tom_bound(Problems& problems) {
    const std::set<int> tight = {2, 4, 5, 6, 7, 9, 10};
    size_t within2 = 0;
    for (int w = 1; w <= 10; ++w) {
        int est = decode_w(band_of(Willingness(w))).value();
        int err = std::abs(est - w);
        expect(problems, err <= 2,
               "w=" + std::to_string(w) + " decodes to " + std::to_string(est) +
                   ", error exceeds 2");
        if (err <= 2) ++within2;
        if (tight.count(w))
            expect(problems, err <= 1,
                   "w=" + std::to_string(w) + " decodes to " + std::to_string(est) +
                       ", error exceeds 1 on a tight value");
    }
    expect(problems, within2 == 10, "round-trip accuracy within +-2 must be 100%");
}

// ---------------------------------------------------------------------------
// 4. Directional comparison on synthetic scenarios

std::vector<ItemOutcome> g_fallback_pool;  // reused by check 5

Scenario directional_scenario(int index, Rng& rng) {
    int g = 2 + index % 3;
    Scenario s;
    char id[32];
    std::snprintf(id, sizeof(id), "dir-%03d", index);
    s.id = id;
    s.origin = "Seattle";
    s.destination = "Tokyo";
    s.days = 3;
    s.people_number = g;
    s.budget_anchor = 2000.0;

    auto item = [](std::string key, std::vector<std::string> values) {
        ConstraintItem it;
        it.key = std::move(key);
        it.kind = DomainKind::Categorical;
        it.allowed_values = std::move(values);
        return it;
    };
    s.items = {item("talk__c0", {"P", "Q"}), item("talk__c1", {"P", "Q"}),
               item("talk__c2", {"P", "Q"}),
               item("talk__goal", g == 4 ? std::vector<std::string>{"X", "Y", "Z"}
                                         : std::vector<std::string>{"X", "Y"})};

    for (int m = 0; m < g; ++m) {
        Persona p;
        p.id = "m" + std::to_string(m);
        s.personas.push_back(std::move(p));
    }

    // Three contested items: everyone negotiable (w 6..8), at least two camps.
    for (int c = 0; c < 3; ++c) {
        std::vector<std::string> values;
        for (int m = 0; m < g; ++m) values.push_back(rng.uniform_index(2) == 0 ? "P" : "Q");
        if (std::all_of(values.begin(), values.end(),
                        [&](const std::string& v) { return v == values[0]; }))
            values.back() = values.back() == "P" ? "Q" : "P";
        for (int m = 0; m < g; ++m) {
            int w = 6 + int(rng.uniform_index(3));
            s.personas[m].preferences.push_back(
                Preference{"talk__c" + std::to_string(c), values[m], Willingness(w)});
        }
    }

    // One priority item: a firm holder against indifferent colleagues. The
    // holder's camp gets an ally in larger groups so values stay spread.
    int holder = int(rng.uniform_index(g));
    std::vector<int> others;
    for (int m = 0; m < g; ++m)
        if (m != holder) others.push_back(m);
    std::vector<std::string> goal(g);
    goal[holder] = "X";
    if (g == 2) {
        goal[others[0]] = "Y";
    } else if (g == 3) {
        goal[others[0]] = "X";  // ally
        goal[others[1]] = "Y";
    } else {
        goal[others[0]] = "X";  // ally
        goal[others[1]] = "Y";
        goal[others[2]] = "Z";
    }
    for (int m = 0; m < g; ++m) {
        int w = (m == holder) ? 7 + int(rng.uniform_index(2)) : 1 + int(rng.uniform_index(3));
        s.personas[m].preferences.push_back(Preference{"talk__goal", goal[m], Willingness(w)});
    }
    return s;
}

void check_directional(Problems& problems) {
    auto t0 = std::chrono::steady_clock::now();

    Rng gen(20260822);
    std::vector<Scenario> scenarios;
    for (int i = 0; i < 100; ++i) {
        Scenario s = directional_scenario(i, gen);
        ValidationReport report = validate_scenario(s);
        if (!report.ok()) {
            problems.push_back("generated scenario " + s.id + " invalid: " + report.summary());
            return;
        }
        scenarios.push_back(std::move(s));
    }

    auto run_mode = [&](Mode mode) {
        PolicyConfig cfg;
        cfg.mode = mode;
        std::vector<ItemOutcome> outcomes;
        std::vector<TranscriptEvent> events;
        RulePolicy policy;
        for (size_t i = 0; i < scenarios.size(); ++i) {
            ScenarioRun run = run_scenario(scenarios[i], cfg, 9000 + i, policy);
            outcomes.insert(outcomes.end(), run.outcomes.begin(), run.outcomes.end());
            events.insert(events.end(), run.events.begin(), run.events.end());
        }
        return compute_report(outcomes, events);
    };

    MetricsReport mind = run_mode(Mode::Mind);
    MetricsReport base = run_mode(Mode::Base);

    for (int size : {2, 3, 4}) {
        auto mi = mind.by_group_size.find(size);
        auto bi = base.by_group_size.find(size);
        if (mi == mind.by_group_size.end() || bi == base.by_group_size.end()) {
            problems.push_back("missing group size " + std::to_string(size) + " in a report");
            continue;
        }
        expect(problems, mi->second.debate_ratio >= bi->second.debate_ratio,
               "debate ratio at size " + std::to_string(size) + ": appraisal mode " +
                   std::to_string(mi->second.debate_ratio) + " < baseline " +
                   std::to_string(bi->second.debate_ratio));
    }
    expect(problems, mind.debate_hit_rate.has_value() && base.debate_hit_rate.has_value(),
           "both modes should resolve some items by debate");
    if (mind.debate_hit_rate && base.debate_hit_rate)
        expect(problems, *mind.debate_hit_rate >= *base.debate_hit_rate,
               "debate hit rate: appraisal mode " + std::to_string(*mind.debate_hit_rate) +
                   " < baseline " + std::to_string(*base.debate_hit_rate));

    // Stash fallback-resolved cases for the soundness check below.
    PolicyConfig mind_cfg;
    RulePolicy policy;
    for (size_t i = 0; i < scenarios.size(); ++i) {
        ScenarioRun run = run_scenario(scenarios[i], mind_cfg, 9000 + i, policy);
        for (auto& o : run.outcomes)
            if (o.resolution.fallback) g_fallback_pool.push_back(std::move(o));
    }

    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    expect(problems, seconds < 30.0,
           "directional sweep took " + std::to_string(seconds) + "s, budget is 30s");
}

// ---------------------------------------------------------------------------
// 5. Fallback soundness

void check_fallback_soundness(Problems& problems) {
    std::vector<ItemOutcome> batch;
    for (const auto& o : read_outcomes(repo_path("tests/golden/outcomes.json")))
        if (o.resolution.fallback) batch.push_back(o);
    size_t golden_fallbacks = batch.size();
    batch.insert(batch.end(), g_fallback_pool.begin(), g_fallback_pool.end());

    expect(problems, golden_fallbacks > 0, "reference run should contain fallback cases");
    expect(problems, batch.size() > golden_fallbacks,
           "synthetic sweep should contribute fallback cases");
    if (batch.empty()) return;
    double hwh = high_w_hit(batch);
    expect(problems, hwh == 1.0,
           "all-fallback batch must score high_w_hit exactly 1.0, got " + std::to_string(hwh));
}

// ---------------------------------------------------------------------------
// 6. Determinism

void check_determinism(Problems& problems) {
    auto dir = fresh_dir("determinism");
    RunConfig first = golden_config((dir / "one").string());
    RunConfig second = golden_config((dir / "two").string());
    run_experiment(first);
    run_experiment(second);
    for (const char* name : {"transcripts.jsonl", "outcomes.json", "report.json"}) {
        std::string a = read_file((fs::path(first.out_dir) / name).string());
        std::string b = read_file((fs::path(second.out_dir) / name).string());
        expect(problems, !a.empty() && a == b,
               std::string("reruns differ in ") + name);
    }
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// 7. Consensus arithmetic

void check_consensus_arithmetic(Problems& problems) {
    Vote agree;
    agree.vote = VoteChoice::Agree;
    Vote disagree;
    disagree.vote = VoteChoice::Disagree;
    disagree.revised_value = "other";

    // Scenario 1's round: proposer plus two agreeing voters, 3/3 passes.
    expect(problems, check_consensus({agree, agree}, 3, 0.75),
           "3 of 3 at tau 0.75 should pass");
    // Scenario 4's rounds: one dissenter, 2/3 fails.
    expect(problems, !check_consensus({agree, disagree}, 3, 0.75),
           "2 of 3 at tau 0.75 should fail");
}

// ---------------------------------------------------------------------------
// 8. Judging substitute

std::string canned_verdict(const std::array<char, 5>& winners, char overall) {
    std::string out;
    for (size_t i = 0; i < llm::kJudgeCriteria.size(); ++i) {
        std::string name(llm::kJudgeCriteria[i]);
        for (char& ch : name) ch = char(std::toupper(static_cast<unsigned char>(ch)));
        out += "[" + name + ": " + winners[i] + "]\n";
    }
    out += std::string("[OVERALL_WINNER: ") + overall + "]";
    return out;
}

void check_judging(Problems& problems) {
    // Two identical plans built from the reference transcript.
    std::vector<TranscriptEvent> events;
    for (const auto& e : read_transcript(repo_path("tests/golden/transcripts.jsonl")))
        if (e.scenario_id == "nonsmoking-consensus") events.push_back(e);
    std::vector<ItemOutcome> outcomes;
    for (const auto& o : read_outcomes(repo_path("tests/golden/outcomes.json")))
        if (o.scenario_id == "nonsmoking-consensus") outcomes.push_back(o);
    expect(problems, !events.empty() && !outcomes.empty(),
           "reference transcript should cover nonsmoking-consensus");

    llm::PlanSummary a = llm::summarize_plan("candidate-a", events, outcomes);
    llm::PlanSummary b = llm::summarize_plan("candidate-b", events, outcomes);

    // A judge that cannot tell the plans apart answers by position; the swap
    // turns every such answer into a tie.
    auto transport = std::make_shared<llm::ScriptedTransport>(std::vector<std::string>{
        canned_verdict({'A', 'A', 'A', 'A', 'A'}, 'A'),
        canned_verdict({'A', 'A', 'A', 'A', 'A'}, 'A')});
    llm::LlmClient client(transport);
    llm::PairJudgement tie = llm::judge_pair(client, a, b);
    expect(problems, tie.evaluated, "identical-plan judgement should parse");
    for (size_t i = 0; i < tie.criteria.size(); ++i)
        expect(problems, tie.criteria[i] == llm::JudgeWinner::Tie,
               "criterion " + std::string(llm::kJudgeCriteria[i]) +
                   " should tie under position swap");
    expect(problems, tie.overall == llm::JudgeWinner::Tie,
           "overall verdict should tie under position swap");

    // Canned verdicts parse into the five named criteria.
    auto parsed = llm::parse_judge(canned_verdict({'A', 'B', 'A', 'B', 'A'}, 'B'));
    expect(problems, parsed.ok(), "canned verdict should parse: " + parsed.error);
    if (parsed.ok()) {
        const std::array<char, 5> want = {'A', 'B', 'A', 'B', 'A'};
        expect(problems, parsed.value->winners == want,
               "canned verdict winners should map onto the criterion list in order");
        expect(problems, parsed.value->overall == 'B', "canned verdict overall should be B");
    }

    // A consistent judgement across both orders is honoured, not tied.
    auto transport2 = std::make_shared<llm::ScriptedTransport>(std::vector<std::string>{
        canned_verdict({'A', 'A', 'A', 'A', 'A'}, 'A'),
        canned_verdict({'B', 'B', 'B', 'B', 'B'}, 'B')});
    llm::LlmClient client2(transport2);
    llm::PairJudgement win = llm::judge_pair(client2, a, b);
    expect(problems, win.evaluated && win.overall == llm::JudgeWinner::A,
           "a position-stable verdict should survive the swap");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Problems&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"golden-traces", check_golden_traces},
        {"metric-oracle", check_metric_oracle},
        {"tone-roundtrip-bound", check_tom_bound},
        {"directional-advantage", check_directional},
        {"fallback-soundness", check_fallback_soundness},
        {"determinism", check_determinism},
        {"consensus-arithmetic", check_consensus_arithmetic},
        {"judging-substitute", check_judging},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Problems problems;
        try {
            criteria[i].run(problems);
        } catch (const std::exception& e) {
            problems.push_back(std::string("exception: ") + e.what());
        }
        if (problems.empty()) {
            std::printf("[PASS] %zu. %s\n", i + 1, criteria[i].name);
        } else {
            ++failures;
            std::printf("[FAIL] %zu. %s\n", i + 1, criteria[i].name);
            for (const auto& p : problems) std::printf("       - %s\n", p.c_str());
        }
    }
    std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
