#include "mind/engine.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <utility>

namespace mind {

using nlohmann::json;

std::string_view event_kind_name(EventKind k) noexcept {
    switch (k) {
        case EventKind::Proposal: return "proposal";
        case EventKind::Appraisal: return "appraisal";
        case EventKind::Vote: return "vote";
        case EventKind::ProposerAction: return "proposer_action";
        case EventKind::Resolution: return "resolution";
        case EventKind::Degradation: return "degradation";
    }
    return "proposal";
}

EventKind event_kind_from_name(std::string_view name) {
    if (name == "proposal") return EventKind::Proposal;
    if (name == "appraisal") return EventKind::Appraisal;
    if (name == "vote") return EventKind::Vote;
    if (name == "proposer_action") return EventKind::ProposerAction;
    if (name == "resolution") return EventKind::Resolution;
    if (name == "degradation") return EventKind::Degradation;
    throw ParseError("bad-event-kind", std::string(name));
}

std::vector<std::string> AgentPolicy::take_notes() { return std::exchange(notes_, {}); }

ProposalRecord RulePolicy::phase1(const TurnContext& ctx) {
    return {ctx.own->value, proposal_rationale(ctx.own_display_tone, ctx.own->value),
            ctx.own_display_tone};
}

std::optional<Appraisal> RulePolicy::appraise_turn(const TurnContext& ctx) {
    if (!ctx.cfg->appraisal_on()) return std::nullopt;
    return appraise(*ctx.own, ctx.current_value, ctx.proposer_tone);
}

Vote RulePolicy::vote_turn(const TurnContext& ctx, const std::optional<Appraisal>& appraisal) {
    Vote v = appraisal ? cast_vote(*appraisal, *ctx.own, *ctx.item, ctx.current_value, ctx.round)
                       : base_vote(*ctx.own, *ctx.item, ctx.current_value, ctx.round);
    if (v.tone != ctx.own_display_tone) {
        v.tone = ctx.own_display_tone;
        v.rationale = vote_rationale(v.tone, v.vote, ctx.current_value, v.revised_value.value_or(""));
    }
    return v;
}

ProposerAction RulePolicy::update_turn(const TurnContext& ctx, const std::vector<Vote>& votes) {
    ProposerAction act = propose_update(*ctx.own, ctx.current_value, votes, *ctx.item, *ctx.cfg);
    if (act.tone != ctx.own_display_tone) {
        act.tone = ctx.own_display_tone;
        act.rationale = action_rationale(act.tone, act.action, act.new_value);
    }
    return act;
}

bool check_consensus(const std::vector<Vote>& votes, int group_size, double tau) {
    if (group_size < 2) throw DomainError("group-size", "consensus needs at least 2 agents");
    if (static_cast<int>(votes.size()) != group_size - 1)
        throw DomainError("vote-count", "expected " + std::to_string(group_size - 1) + " votes, got " +
                                            std::to_string(votes.size()));
    int agrees = 0;
    for (const Vote& v : votes)
        if (v.vote == VoteChoice::Agree) ++agrees;
    // The proposer implicitly backs its own standing proposal.
    return static_cast<double>(1 + agrees) / static_cast<double>(group_size) >= tau;
}

std::string fallback_value(const std::vector<std::pair<std::string, Preference>>& prefs) {
    if (prefs.empty()) throw DomainError("empty-prefs", "fallback needs at least one preference");
    const std::pair<std::string, Preference>* best = &prefs.front();
    for (const auto& entry : prefs)
        if (entry.second.w > best->second.w) best = &entry;  // strict >, so earliest wins ties
    return best->second.value;
}

namespace {

const Preference& require_pref(const Persona& p, const ConstraintItem& item) {
    const Preference* pref = p.preference_for(item.key);
    if (!pref)
        throw DomainError("incomplete-scenario", p.id + " has no preference for " + item.key);
    return *pref;
}

ItemOutcome build_outcome(const Scenario& s, const ConstraintItem& item,
                          const std::string& final_value, Resolution res,
                          const std::string& proposer) {
    ItemOutcome out;
    out.scenario_id = s.id;
    out.item_key = item.key;
    out.final_value = final_value;
    out.resolution = res;
    out.hard = item.hard;
    out.proposer = proposer;
    int top_w = 0;
    for (const Persona& p : s.personas) {
        const Preference& pref = require_pref(p, item);
        out.agents.push_back({p.id, pref.value, pref.w.value(), pref.value == final_value});
        top_w = std::max(top_w, pref.w.value());
    }
    for (const AgentOutcome& a : out.agents)
        if (a.w == top_w) out.top_agents.push_back(a.id);
    return out;
}

class EventLog {
public:
    EventLog(std::string scenario_id, std::string item_key)
        : scenario_id_(std::move(scenario_id)), item_key_(std::move(item_key)) {}

    void emit(int round, const std::string& actor, EventKind kind, bool hidden, json payload) {
        events_.push_back(
            {seq_++, scenario_id_, item_key_, round, actor, kind, hidden, std::move(payload)});
    }

    void drain_notes(AgentPolicy& policy, int round, const std::string& actor) {
        for (std::string& text : policy.take_notes())
            emit(round, actor, EventKind::Degradation, true, json{{"detail", std::move(text)}});
    }

    std::vector<TranscriptEvent> take() { return std::move(events_); }
    const std::vector<TranscriptEvent>& events() const { return events_; }

private:
    std::string scenario_id_;
    std::string item_key_;
    std::uint64_t seq_ = 0;
    std::vector<TranscriptEvent> events_;
};

}  // namespace

ItemRun run_item(const Scenario& s, const ConstraintItem& item, const PolicyConfig& cfg,
                 std::uint64_t seed, AgentPolicy& policy) {
    if (!s.item(item.key))
        throw DomainError("unknown-item", item.key + " is not part of scenario " + s.id);
    if (item.hard)
        throw DomainError("hard-item", item.key + " is hard and cannot be negotiated");
    if (s.personas.size() < 2)
        throw DomainError("group-size", "negotiation needs at least 2 personas");

    Rng rng(seed);
    EventLog log(s.id, item.key);

    auto make_ctx = [&](const Persona& agent, const std::string& current, int round,
                        ToneBand proposer_tone, ToneBand display) {
        TurnContext ctx;
        ctx.scenario = &s;
        ctx.item = &item;
        ctx.agent = &agent;
        ctx.own = &require_pref(agent, item);
        ctx.current_value = current;
        ctx.round = round;
        ctx.proposer_tone = proposer_tone;
        ctx.own_display_tone = display;
        ctx.cfg = &cfg;
        ctx.history = &log.events();
        return ctx;
    };

    // Phase 1: opening statements, private values verbatim.
    std::vector<ProposalRecord> proposals;
    for (const Persona& p : s.personas) {
        const Preference& own = require_pref(p, item);
        ToneBand display = encode_tone(own.w, cfg.tone_on(), cfg.tone_noise_eps, rng);
        TurnContext ctx = make_ctx(p, "", 0, ToneBand::Neutral, display);
        ProposalRecord rec = policy.phase1(ctx);
        log.drain_notes(policy, 0, p.id);
        if (rec.value != own.value) {
            log.emit(0, p.id, EventKind::Degradation, true,
                     json{{"detail", "opening proposal replaced with the private value"}});
            rec.value = own.value;
        }
        rec.tone = display;
        log.emit(0, p.id, EventKind::Proposal, false,
                 json{{"value", rec.value}, {"rationale", rec.rationale}, {"tone", tone_name(rec.tone)}});
        proposals.push_back(std::move(rec));
    }

    // The drawn proposal becomes the standing value; its author chairs.
    const std::size_t pi = rng.uniform_index(s.personas.size());
    const Persona& proposer = s.personas[pi];
    std::string current = proposals[pi].value;
    ToneBand proposer_tone = proposals[pi].tone;

    std::optional<int> consensus_round;
    for (int round = 1; round <= cfg.max_rounds; ++round) {
        std::vector<Vote> votes;
        for (std::size_t i = 0; i < s.personas.size(); ++i) {
            if (i == pi) continue;
            const Persona& voter = s.personas[i];
            const Preference& own = require_pref(voter, item);
            ToneBand display = encode_tone(own.w, cfg.tone_on(), cfg.tone_noise_eps, rng);
            TurnContext ctx = make_ctx(voter, current, round, proposer_tone, display);

            std::optional<Appraisal> appraisal = policy.appraise_turn(ctx);
            log.drain_notes(policy, round, voter.id);
            if (appraisal) {
                log.emit(round, voter.id, EventKind::Appraisal, true,
                         json{{"guessed_w", appraisal->guessed_opponent_w.value()},
                              {"room_for_compromise", appraisal->room_for_compromise},
                              {"strategy", strategy_name(appraisal->strategy)}});
            }

            Vote v = policy.vote_turn(ctx, appraisal);
            log.drain_notes(policy, round, voter.id);
            if (v.vote == VoteChoice::Disagree) {
                if (!v.revised_value)
                    throw DomainError("malformed-vote", voter.id + " disagreed without a counter-value");
                if (!item.allows(*v.revised_value))
                    throw DomainError("value-not-allowed",
                                      voter.id + " proposed \"" + *v.revised_value + "\"");
            }
            log.emit(round, voter.id, EventKind::Vote, false,
                     json{{"vote", v.vote == VoteChoice::Agree ? "agree" : "disagree"},
                          {"revised_value", v.revised_value ? json(*v.revised_value) : json()},
                          {"rationale", v.rationale},
                          {"tone", tone_name(v.tone)}});
            votes.push_back(std::move(v));
        }

        if (check_consensus(votes, static_cast<int>(s.personas.size()), cfg.tau)) {
            consensus_round = round;
            break;
        }

        if (round < cfg.max_rounds) {
            const Preference& own = require_pref(proposer, item);
            ToneBand display = encode_tone(own.w, cfg.tone_on(), cfg.tone_noise_eps, rng);
            TurnContext ctx = make_ctx(proposer, current, round, proposer_tone, display);
            ProposerAction act = policy.update_turn(ctx, votes);
            log.drain_notes(policy, round, proposer.id);
            if (!item.allows(act.new_value))
                throw DomainError("value-not-allowed",
                                  "proposer picked \"" + act.new_value + "\" for " + item.key);
            if (act.action == ProposerMove::Keep && act.new_value != current)
                throw DomainError("malformed-action", "keep must retain the standing value");
            act.tone = display;
            log.emit(round, proposer.id, EventKind::ProposerAction, false,
                     json{{"action", std::string(move_name(act.action))},
                          {"new_value", act.new_value},
                          {"rationale", act.rationale},
                          {"tone", tone_name(act.tone)}});
            current = act.new_value;
            proposer_tone = act.tone;
        }
    }

    std::string final_value;
    Resolution res;
    if (consensus_round) {
        final_value = current;
        res = {false, *consensus_round};
    } else {
        std::vector<std::pair<std::string, Preference>> prefs;
        for (const Persona& p : s.personas) prefs.emplace_back(p.id, require_pref(p, item));
        final_value = fallback_value(prefs);
        res = {true, 0};
    }

    log.emit(consensus_round.value_or(cfg.max_rounds), proposer.id, EventKind::Resolution, false,
             json{{"final_value", final_value},
                  {"resolution", res.fallback ? "fallback" : "debate"},
                  {"round", res.fallback ? json() : json(res.round)},
                  {"proposer", proposer.id}});

    ItemRun run;
    run.outcome = build_outcome(s, item, final_value, res, proposer.id);
    run.events = log.take();
    return run;
}

ScenarioRun run_scenario(const Scenario& s, const PolicyConfig& cfg, std::uint64_t run_seed,
                         AgentPolicy& policy) {
    ValidationReport report = validate_scenario(s);
    if (!report.ok())
        throw DomainError("invalid-scenario", s.id + ": " + report.summary());

    ScenarioRun out;
    for (const ConstraintItem& item : s.items) {
        if (item.hard) {
            // Settled by construction; record the unanimous value without debate.
            const std::string& value = require_pref(s.personas.front(), item).value;
            ItemOutcome outcome = build_outcome(s, item, value, {false, 1}, "");
            out.events.push_back({0, s.id, item.key, 1, "", EventKind::Resolution, false,
                                  json{{"final_value", value},
                                       {"resolution", "debate"},
                                       {"round", 1},
                                       {"proposer", ""}}});
            out.outcomes.push_back(std::move(outcome));
            continue;
        }
        ItemRun run = run_item(s, item, cfg, derive_item_seed(run_seed, s.id, item.key), policy);
        out.outcomes.push_back(std::move(run.outcome));
        for (TranscriptEvent& e : run.events) out.events.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < out.events.size(); ++i) out.events[i].seq = i;
    return out;
}

json event_to_json(const TranscriptEvent& e) {
    return {{"schema", kTranscriptSchema}, {"seq", e.seq},       {"scenario", e.scenario_id},
            {"item", e.item_key},          {"round", e.round},   {"actor", e.actor},
            {"kind", event_kind_name(e.kind)}, {"hidden", e.hidden}, {"payload", e.payload}};
}

TranscriptEvent event_from_json(const json& j) {
    if (j.value("schema", "") != kTranscriptSchema)
        throw ParseError("schema-mismatch", "transcript line lacks " + std::string(kTranscriptSchema));
    TranscriptEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.scenario_id = j.at("scenario").get<std::string>();
    e.item_key = j.at("item").get<std::string>();
    e.round = j.at("round").get<int>();
    e.actor = j.at("actor").get<std::string>();
    e.kind = event_kind_from_name(j.at("kind").get<std::string>());
    e.hidden = j.at("hidden").get<bool>();
    e.payload = j.at("payload");
    return e;
}

void write_transcript(const std::string& path, const std::vector<TranscriptEvent>& events) {
    std::ofstream out(path);
    if (!out) throw ParseError("io-error", "cannot write " + path);
    for (const TranscriptEvent& e : events) out << event_to_json(e).dump() << "\n";
}

std::vector<TranscriptEvent> read_transcript(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("io-error", "cannot open " + path);
    std::vector<TranscriptEvent> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            events.push_back(event_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError("bad-json", path + ": " + e.what());
        }
    }
    return events;
}

namespace {

json outcome_to_json(const ItemOutcome& o) {
    json agents = json::array();
    for (const AgentOutcome& a : o.agents)
        agents.push_back(
            {{"id", a.id}, {"value", a.initial_value}, {"w", a.w}, {"matched", a.matched}});
    return {{"scenario", o.scenario_id},
            {"item", o.item_key},
            {"final_value", o.final_value},
            {"resolution",
             {{"type", o.resolution.fallback ? "fallback" : "debate"},
              {"round", o.resolution.fallback ? json() : json(o.resolution.round)}}},
            {"hard", o.hard},
            {"proposer", o.proposer},
            {"agents", agents},
            {"top_agents", o.top_agents}};
}

ItemOutcome outcome_from_json(const json& j) {
    ItemOutcome o;
    o.scenario_id = j.at("scenario").get<std::string>();
    o.item_key = j.at("item").get<std::string>();
    o.final_value = j.at("final_value").get<std::string>();
    const json& res = j.at("resolution");
    o.resolution.fallback = res.at("type").get<std::string>() == "fallback";
    if (!o.resolution.fallback) o.resolution.round = res.at("round").get<int>();
    o.hard = j.at("hard").get<bool>();
    o.proposer = j.at("proposer").get<std::string>();
    for (const json& aj : j.at("agents"))
        o.agents.push_back({aj.at("id").get<std::string>(), aj.at("value").get<std::string>(),
                            aj.at("w").get<int>(), aj.at("matched").get<bool>()});
    o.top_agents = j.at("top_agents").get<std::vector<std::string>>();
    return o;
}

}  // namespace

json outcomes_to_json(const std::vector<ItemOutcome>& outcomes) {
    json list = json::array();
    for (const ItemOutcome& o : outcomes) list.push_back(outcome_to_json(o));
    return {{"schema", kOutcomesSchema}, {"outcomes", list}};
}

std::vector<ItemOutcome> outcomes_from_json(const json& j) {
    if (j.value("schema", "") != kOutcomesSchema)
        throw ParseError("schema-mismatch", "expected " + std::string(kOutcomesSchema));
    std::vector<ItemOutcome> outcomes;
    for (const json& oj : j.at("outcomes")) outcomes.push_back(outcome_from_json(oj));
    return outcomes;
}

void write_outcomes(const std::string& path, const std::vector<ItemOutcome>& outcomes) {
    std::ofstream out(path);
    if (!out) throw ParseError("io-error", "cannot write " + path);
    out << outcomes_to_json(outcomes).dump(2) << "\n";
}

std::vector<ItemOutcome> read_outcomes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("io-error", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("bad-json", path + ": " + e.what());
    }
    return outcomes_from_json(j);
}

}  // namespace mind
