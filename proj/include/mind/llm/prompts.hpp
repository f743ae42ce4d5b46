#pragma once

#include <map>
#include <string>
#include <vector>

#include "mind/policy.hpp"

namespace mind::llm {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

enum class Phase {
    Propose,   // opening proposal (JSON reply)
    Vote,      // ballot without a prior appraisal (JSON reply)
    Appraise,  // hidden appraisal step (JSON reply)
    Execute,   // ballot that carries out an appraised strategy (JSON reply)
    Update,    // proposer's revision (tag reply)
    Judge      // pairwise comparison (tag reply)
};

std::string_view phase_name(Phase p) noexcept;

using Bindings = std::map<std::string, std::string>;

// Fill one template. Only the placeholders the template declares are
// substituted (stray {braces} in the text survive untouched); declared
// placeholders absent from `bindings` raise
// ParseError("missing-binding", "<comma-joined keys>").
std::string render_template(std::string_view text, const std::vector<std::string>& placeholders,
                            const Bindings& bindings);

// Messages for one model call: the mode-appropriate system prompt plus the
// phase prompt, with all placeholders bound. Judge calls ignore `cfg`.
std::vector<ChatMessage> render_prompt(Phase phase, const PolicyConfig& cfg,
                                       const Bindings& bindings);

// Capitalized stance label used inside prompts ("Strict", "Firm", ...).
std::string band_label(ToneBand t);

}  // namespace mind::llm
