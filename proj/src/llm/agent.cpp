#include "mind/llm/agent.hpp"

#include <cstdio>
#include <sstream>

namespace mind::llm {

using nlohmann::json;

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
}

std::string format_history(const std::vector<TranscriptEvent>& events) {
    std::ostringstream out;
    bool any = false;
    for (const auto& e : events) {
        if (e.hidden) continue;
        const json& p = e.payload;
        switch (e.kind) {
            case EventKind::Proposal:
                out << e.actor << " proposed \"" << p.value("value", "") << "\": "
                    << p.value("rationale", "") << "\n";
                break;
            case EventKind::Vote: {
                std::string vote = p.value("vote", "");
                out << "[round " << e.round << "] " << e.actor << " voted "
                    << (vote == "agree" ? "AGREE" : "DISAGREE");
                if (p.contains("revised_value") && p["revised_value"].is_string())
                    out << " (suggesting \"" << p["revised_value"].get<std::string>() << "\")";
                out << ": " << p.value("rationale", "") << "\n";
                break;
            }
            case EventKind::ProposerAction:
                out << "[round " << e.round << "] " << e.actor << " chose "
                    << p.value("action", "") << " -> \"" << p.value("new_value", "") << "\": "
                    << p.value("rationale", "") << "\n";
                break;
            default:
                continue;
        }
        any = true;
    }
    if (!any) return "(no discussion yet)";
    std::string text = out.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

LlmPolicy::LlmPolicy(std::shared_ptr<LlmClient> client, LlmPolicyOptions opts)
    : client_(std::move(client)), opts_(std::move(opts)) {}

Bindings LlmPolicy::common_bindings(const TurnContext& ctx) const {
    Bindings b;
    b["target_key"] = ctx.item->key;
    b["current_private_value"] = ctx.own->value;
    b["current_value"] = ctx.current_value;
    b["alpha_band"] = band_label(ctx.own_display_tone);
    b["budget_anchor"] = format_number(ctx.scenario->budget_anchor);
    b["allowed_values"] = json(ctx.item->allowed_values).dump();
    return b;
}

std::string LlmPolicy::ask(Phase phase, const TurnContext& ctx, const Bindings& bindings,
                           const std::string& prior_raw, const std::string& prior_error) {
    auto messages = render_prompt(phase, *ctx.cfg, bindings);
    if (!prior_error.empty()) {
        messages.push_back({"assistant", prior_raw});
        messages.push_back({"user", "Your previous reply could not be used: " + prior_error +
                                        ". Respond again following the required output format "
                                        "exactly."});
    }
    ChatRequest req;
    req.model = opts_.model;
    req.temperature = opts_.temperature;
    req.max_tokens =
        phase == Phase::Appraise ? opts_.appraisal_max_tokens : opts_.proposal_max_tokens;
    req.messages = std::move(messages);
    return client_->complete(req);
}

ProposalRecord LlmPolicy::phase1(const TurnContext& ctx) {
    Bindings b = common_bindings(ctx);
    b["filtered_constraints"] = json{{ctx.item->key, ctx.own->value}}.dump();
    b["people_number"] = std::to_string(ctx.scenario->people_number);
    b["org"] = ctx.scenario->origin;
    b["dest"] = ctx.scenario->destination;
    b["days"] = std::to_string(ctx.scenario->days);

    std::string error, last_raw;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw = ask(Phase::Propose, ctx, b, last_raw, error);
        auto parsed = parse_proposal(raw, *ctx.item);
        if (parsed.ok())
            return ProposalRecord{parsed.value->value, parsed.value->rationale,
                                  ctx.own_display_tone};
        error = parsed.error;
        last_raw = raw;
    }
    note("opening reply unusable (" + error + "); rule policy supplied this turn");
    return rule_.phase1(ctx);
}

std::optional<Appraisal> LlmPolicy::appraise_turn(const TurnContext& ctx) {
    if (!ctx.cfg->appraisal_on()) return std::nullopt;
    Bindings b = common_bindings(ctx);
    std::string error, last_raw;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw = ask(Phase::Appraise, ctx, b, last_raw, error);
        auto parsed = parse_appraisal(raw);
        if (parsed.ok()) return *parsed.value;
        error = parsed.error;
        last_raw = raw;
    }
    note("appraisal reply unusable (" + error + "); rule policy supplied this turn");
    return rule_.appraise_turn(ctx);
}

Vote LlmPolicy::vote_turn(const TurnContext& ctx, const std::optional<Appraisal>& appraisal) {
    Bindings b = common_bindings(ctx);
    Phase phase;
    if (appraisal) {
        phase = Phase::Execute;
        b["strategy_intent"] = std::string(strategy_name(appraisal->strategy));
    } else {
        phase = Phase::Vote;
        b["current_round"] = std::to_string(ctx.round);
        b["discussion_history"] =
            ctx.history ? format_history(*ctx.history) : "(no discussion yet)";
    }
    std::string error, last_raw;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw = ask(phase, ctx, b, last_raw, error);
        auto parsed = parse_ballot(raw, *ctx.item);
        if (parsed.ok())
            return Vote{parsed.value->vote, parsed.value->revised_value, parsed.value->rationale,
                        ctx.own_display_tone};
        error = parsed.error;
        last_raw = raw;
    }
    note("ballot reply unusable (" + error + "); rule policy supplied this turn");
    return rule_.vote_turn(ctx, appraisal);
}

ProposerAction LlmPolicy::update_turn(const TurnContext& ctx, const std::vector<Vote>& votes) {
    Bindings b = common_bindings(ctx);
    size_t dissenters = 0;
    std::ostringstream dissent;
    for (const auto& v : votes) {
        if (v.vote != VoteChoice::Disagree) continue;
        ++dissenters;
        dissent << "- A voter DISAGREED";
        if (v.revised_value) dissent << ", proposing \"" << *v.revised_value << "\"";
        if (!v.rationale.empty()) dissent << ": " << v.rationale;
        dissent << "\n";
    }
    std::string dissent_text = dissent.str();
    if (!dissent_text.empty() && dissent_text.back() == '\n') dissent_text.pop_back();
    if (dissent_text.empty()) dissent_text = "(no dissent)";
    b["dissent_text"] = dissent_text;

    const size_t group = ctx.scenario->personas.size();
    std::ostringstream rate;
    rate << dissenters << " out of " << group << " agents disagree";
    b["dissent_rate"] = rate.str();

    std::string error, last_raw;
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw = ask(Phase::Update, ctx, b, last_raw, error);
        auto parsed = parse_update(raw, *ctx.item);
        if (!parsed.ok()) {
            error = parsed.error;
            last_raw = raw;
            continue;
        }
        const UpdateParse& up = *parsed.value;
        ProposerMove action;
        if (up.action) {
            action = *up.action;
        } else {
            action = (up.revised_value && *up.revised_value != ctx.current_value)
                         ? ProposerMove::Update
                         : ProposerMove::Keep;
        }
        std::string value = action == ProposerMove::Keep ? ctx.current_value : *up.revised_value;
        return ProposerAction{action, value, up.rationale, ctx.own_display_tone};
    }
    note("revision reply unusable (" + error + "); rule policy supplied this turn");
    return rule_.update_turn(ctx, votes);
}

}  // namespace mind::llm
