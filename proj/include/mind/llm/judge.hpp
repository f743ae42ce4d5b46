#pragma once

#include <array>
#include <string>
#include <vector>

#include "mind/engine.hpp"
#include "mind/llm/client.hpp"
#include "mind/llm/parser.hpp"

namespace mind::llm {

struct PlanSummary {
    std::string version;
    std::string constraints_text;
    std::string conversation;
};

PlanSummary summarize_plan(const std::string& version, const std::vector<TranscriptEvent>& events,
                           const std::vector<ItemOutcome>& outcomes);

enum class JudgeWinner { A, B, Tie };

std::string_view judge_winner_name(JudgeWinner w) noexcept;

struct PairJudgement {
    std::array<JudgeWinner, 5> criteria{};  // kJudgeCriteria order
    JudgeWinner overall = JudgeWinner::Tie;
    bool evaluated = false;
    std::string error;
};

struct JudgeOptions {
    std::string model = "gpt-4.1-2025-04-14";
    double temperature = 0.0;
    int max_tokens = 512;
};

// Compares two plans twice with positions swapped; a winner is reported per
// criterion only when both orders agree, otherwise that criterion ties. An
// unparseable verdict leaves the pair unevaluated.
PairJudgement judge_pair(LlmClient& client, const PlanSummary& a, const PlanSummary& b,
                         const JudgeOptions& opts = {});

}  // namespace mind::llm
