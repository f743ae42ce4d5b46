#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "mind/domain.hpp"
#include "mind/llm/prompts.hpp"
#include "mind/policy.hpp"

namespace mind::llm {

// Parse outcome: either a payload or a re-askable error message. Model output
// is never silently repaired; a value that is not an exact member of the
// allowed list is a failure.
template <class T>
struct Parsed {
    std::optional<T> value;
    std::string error;
    bool ok() const { return value.has_value(); }
};

struct P1Proposal {
    std::string value;
    std::string rationale;
};

struct BallotParse {
    VoteChoice vote;
    std::optional<std::string> revised_value;
    std::string rationale;
};

struct UpdateParse {
    std::optional<ProposerMove> action;  // absent when the reply carries no ACTION tag
    std::optional<std::string> revised_value;
    std::string rationale;
};

inline constexpr std::array<std::string_view, 5> kJudgeCriteria = {
    "negotiation_rationality", "preference_alignment", "reason_value_validity",
    "opinion_change_justification", "fluency_naturalness"};

struct JudgeParse {
    std::array<char, 5> winners{};  // 'A' or 'B' per criterion, kJudgeCriteria order
    char overall = 0;
};

Parsed<P1Proposal> parse_proposal(const std::string& raw, const ConstraintItem& item);
Parsed<Appraisal> parse_appraisal(const std::string& raw);
Parsed<BallotParse> parse_ballot(const std::string& raw, const ConstraintItem& item);
Parsed<UpdateParse> parse_update(const std::string& raw, const ConstraintItem& item);
Parsed<JudgeParse> parse_judge(const std::string& raw);

struct ParsedResponse {
    Phase phase;
    std::variant<P1Proposal, Appraisal, BallotParse, UpdateParse, JudgeParse> payload;
    std::string raw;
};

Parsed<ParsedResponse> parse_response(Phase phase, const std::string& raw,
                                      const ConstraintItem& item);

// First bracketed tag value, e.g. extract_tag(s, "ACTION") on "[ACTION: KEEP]".
std::optional<std::string> extract_tag(const std::string& raw, std::string_view name);

}  // namespace mind::llm
