#pragma once

#include <memory>
#include <string>

#include "mind/engine.hpp"
#include "mind/llm/client.hpp"
#include "mind/llm/parser.hpp"

namespace mind::llm {

struct LlmPolicyOptions {
    std::string model = "gpt-4.1-mini-2025-04-14";
    double temperature = 0.4;
    int appraisal_max_tokens = 256;
    int proposal_max_tokens = 512;
};

// Model-backed agent. Each turn renders the phase prompt, asks the model,
// and parses strictly; one re-ask with the parse error appended, then the
// deterministic rule policy supplies the turn and a hidden degradation note
// records the substitution. Transport errors propagate to the caller.
class LlmPolicy final : public AgentPolicy {
  public:
    explicit LlmPolicy(std::shared_ptr<LlmClient> client, LlmPolicyOptions opts = {});

    ProposalRecord phase1(const TurnContext& ctx) override;
    std::optional<Appraisal> appraise_turn(const TurnContext& ctx) override;
    Vote vote_turn(const TurnContext& ctx, const std::optional<Appraisal>& appraisal) override;
    ProposerAction update_turn(const TurnContext& ctx, const std::vector<Vote>& votes) override;

  private:
    std::string ask(Phase phase, const TurnContext& ctx, const Bindings& bindings,
                    const std::string& prior_raw, const std::string& prior_error);
    Bindings common_bindings(const TurnContext& ctx) const;

    std::shared_ptr<LlmClient> client_;
    LlmPolicyOptions opts_;
    RulePolicy rule_;
};

// Compact plain-text rendering of visible events, newest last; prompt fodder.
std::string format_history(const std::vector<TranscriptEvent>& events);

std::string format_number(double value);

}  // namespace mind::llm
