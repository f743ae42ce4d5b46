#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mind/domain.hpp"
#include "mind/rng.hpp"

namespace mind {

enum class Strategy { Accept, Yield, Compromise, Push };

std::string_view strategy_name(Strategy s) noexcept;
Strategy strategy_from_name(std::string_view name);

// Private read of the standing proposal: what the voter thinks the proposer's
// hidden weight is, and what to do about it. Never shown to other agents.
struct Appraisal {
    Willingness guessed_opponent_w;
    bool room_for_compromise = true;
    Strategy strategy = Strategy::Compromise;
};

enum class VoteChoice { Agree, Disagree };

struct Vote {
    VoteChoice vote = VoteChoice::Agree;
    std::optional<std::string> revised_value;  // present iff Disagree
    std::string rationale;
    ToneBand tone = ToneBand::Neutral;
};

enum class ProposerMove { Keep, Update, Compromise };

std::string_view move_name(ProposerMove m) noexcept;

struct ProposerAction {
    ProposerMove action = ProposerMove::Keep;
    std::string new_value;  // equals the standing value for Keep
    std::string rationale;
    ToneBand tone = ToneBand::Neutral;
};

enum class Mode { Base, Mind, ToneOnly, AppraisalOnly };

std::string_view mode_name(Mode m) noexcept;
Mode mode_from_name(std::string_view name);

struct PolicyConfig {
    Mode mode = Mode::Mind;
    double tone_noise_eps = 0.0;  // chance a displayed tone slips one band
    double tau = 0.75;            // consensus threshold
    int max_rounds = 3;

    bool tone_on() const noexcept { return mode == Mode::Mind || mode == Mode::ToneOnly; }
    bool appraisal_on() const noexcept { return mode == Mode::Mind || mode == Mode::AppraisalOnly; }
};

// Displayed stance for a hidden weight. With tone off the channel is mute
// (always Neutral). With eps > 0 the band slips one level up or down with
// probability eps, clamped to the valid range. Consumes rng draws only when
// tone is on and eps > 0 (one draw, plus one more when a slip happens).
ToneBand encode_tone(Willingness w, bool tone_on, double eps, Rng& rng);

// Best integer guess of the weight behind a displayed tone.
Willingness decode_w(ToneBand t);

// Read the proposer's tone and pick a counter-strategy for this item.
Appraisal appraise(const Preference& own, const std::string& current_value, ToneBand proposer_tone);

// Ordinal midpoint between two values, rounding toward `toward` when the
// midpoint falls between indices. Throws on categorical items or foreign values.
std::string middle_ground(const ConstraintItem& item, const std::string& from,
                          const std::string& toward);

// Turn an appraisal into a ballot. Concession escalation: an ordinal gap of
// one index is accepted from round 2 on.
Vote cast_vote(const Appraisal& a, const Preference& own, const ConstraintItem& item,
               const std::string& current_value, int round);

// Tone-deaf ballot: agree only on an exact match (or the same ordinal
// escalation as above); otherwise restate one's own value. Never reads w.
Vote base_vote(const Preference& own, const ConstraintItem& item, const std::string& current_value,
               int round);

// Proposer's move after a failed consensus check. With appraisal on, dissent
// tone is read and majority pressure forces movement unless w is 10; with
// appraisal off, only a strict dissent majority moves the proposer.
ProposerAction propose_update(const Preference& own, const std::string& current_value,
                              const std::vector<Vote>& votes, const ConstraintItem& item,
                              const PolicyConfig& cfg);

// Deterministic rationale text for rule-driven agents, flavoured by displayed
// tone. Never leaks numeric weights.
std::string proposal_rationale(ToneBand t, const std::string& value);
std::string vote_rationale(ToneBand t, VoteChoice c, const std::string& current,
                           const std::string& revised);
std::string action_rationale(ToneBand t, ProposerMove m, const std::string& value);

}  // namespace mind
