#include "mind/llm/judge.hpp"

#include "mind/llm/agent.hpp"

namespace mind::llm {

std::string_view judge_winner_name(JudgeWinner w) noexcept {
    switch (w) {
        case JudgeWinner::A: return "a";
        case JudgeWinner::B: return "b";
        case JudgeWinner::Tie: return "tie";
    }
    return "tie";
}

PlanSummary summarize_plan(const std::string& version, const std::vector<TranscriptEvent>& events,
                           const std::vector<ItemOutcome>& outcomes) {
    PlanSummary out;
    out.version = version;
    std::string constraints;
    for (const auto& o : outcomes) {
        if (!constraints.empty()) constraints += "; ";
        constraints += o.item_key + " = " + o.final_value;
    }
    out.constraints_text = constraints.empty() ? "(none)" : constraints;
    out.conversation = format_history(events);
    return out;
}

namespace {

Parsed<JudgeParse> run_order(LlmClient& client, const JudgeOptions& opts, const PlanSummary& first,
                             const PlanSummary& second) {
    Bindings b;
    b["version_a"] = first.version;
    b["constraints_a"] = first.constraints_text;
    b["conversation_a"] = first.conversation;
    b["version_b"] = second.version;
    b["constraints_b"] = second.constraints_text;
    b["conversation_b"] = second.conversation;
    ChatRequest req;
    req.model = opts.model;
    req.temperature = opts.temperature;
    req.max_tokens = opts.max_tokens;
    req.messages = render_prompt(Phase::Judge, PolicyConfig{}, b);
    return parse_judge(client.complete(req));
}

// The swapped order labels our plan B as "A"; undo that relabeling.
JudgeWinner unswap(char c) { return c == 'A' ? JudgeWinner::B : JudgeWinner::A; }

JudgeWinner straight(char c) { return c == 'A' ? JudgeWinner::A : JudgeWinner::B; }

JudgeWinner combine(char forward, char swapped) {
    JudgeWinner f = straight(forward);
    JudgeWinner s = unswap(swapped);
    return f == s ? f : JudgeWinner::Tie;
}

}  // namespace

PairJudgement judge_pair(LlmClient& client, const PlanSummary& a, const PlanSummary& b,
                         const JudgeOptions& opts) {
    PairJudgement out;
    auto forward = run_order(client, opts, a, b);
    if (!forward.ok()) {
        out.error = "forward order verdict unparseable: " + forward.error;
        return out;
    }
    auto swapped = run_order(client, opts, b, a);
    if (!swapped.ok()) {
        out.error = "swapped order verdict unparseable: " + swapped.error;
        return out;
    }
    for (size_t i = 0; i < kJudgeCriteria.size(); ++i)
        out.criteria[i] = combine(forward.value->winners[i], swapped.value->winners[i]);
    out.overall = combine(forward.value->overall, swapped.value->overall);
    out.evaluated = true;
    return out;
}

}  // namespace mind::llm
