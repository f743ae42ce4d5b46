#include "mind/policy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mind {

std::string_view strategy_name(Strategy s) noexcept {
    switch (s) {
        case Strategy::Accept: return "accept";
        case Strategy::Yield: return "yield";
        case Strategy::Compromise: return "compromise";
        case Strategy::Push: return "push";
    }
    return "compromise";
}

Strategy strategy_from_name(std::string_view name) {
    if (name == "accept") return Strategy::Accept;
    if (name == "yield") return Strategy::Yield;
    if (name == "compromise") return Strategy::Compromise;
    if (name == "push") return Strategy::Push;
    throw ParseError("bad-strategy", std::string(name));
}

std::string_view move_name(ProposerMove m) noexcept {
    switch (m) {
        case ProposerMove::Keep: return "keep";
        case ProposerMove::Update: return "update";
        case ProposerMove::Compromise: return "compromise";
    }
    return "keep";
}

std::string_view mode_name(Mode m) noexcept {
    switch (m) {
        case Mode::Base: return "base";
        case Mode::Mind: return "mind";
        case Mode::ToneOnly: return "tone-only";
        case Mode::AppraisalOnly: return "appraisal-only";
    }
    return "mind";
}

Mode mode_from_name(std::string_view name) {
    if (name == "base") return Mode::Base;
    if (name == "mind") return Mode::Mind;
    if (name == "tone-only" || name == "tone_only") return Mode::ToneOnly;
    if (name == "appraisal-only" || name == "appraisal_only") return Mode::AppraisalOnly;
    throw ParseError("bad-mode", std::string(name));
}

ToneBand encode_tone(Willingness w, bool tone_on, double eps, Rng& rng) {
    if (!tone_on) return ToneBand::Neutral;
    ToneBand band = band_of(w);
    if (eps > 0.0 && rng.uniform_real() < eps) {
        int shift = rng.uniform_index(2) == 0 ? -1 : 1;
        band = tone_from_level(tone_level(band) + shift);
    }
    return band;
}

Willingness decode_w(ToneBand t) {
    switch (t) {
        case ToneBand::Neutral: return Willingness(2);
        case ToneBand::Warm: return Willingness(5);
        case ToneBand::Firm: return Willingness(8);
        case ToneBand::Strict: return Willingness(10);
    }
    return Willingness(2);
}

Appraisal appraise(const Preference& own, const std::string& current_value,
                   ToneBand proposer_tone) {
    Appraisal a{decode_w(proposer_tone), proposer_tone != ToneBand::Strict, Strategy::Compromise};
    const int own_level = tone_level(band_of(own.w));
    const int opp_level = tone_level(proposer_tone);
    const int gap = opp_level - own_level;

    if (current_value == own.value)
        a.strategy = Strategy::Accept;
    else if (own_level == tone_level(ToneBand::Strict))
        a.strategy = Strategy::Push;
    else if (gap >= 2)
        a.strategy = Strategy::Yield;
    else if (gap <= -2)
        a.strategy = Strategy::Push;
    else
        a.strategy = Strategy::Compromise;
    return a;
}

std::string middle_ground(const ConstraintItem& item, const std::string& from,
                          const std::string& toward) {
    if (item.kind != DomainKind::Ordinal)
        throw DomainError("not-ordinal", item.key + " has no ordered middle");
    auto fi = item.index_of(from);
    auto ti = item.index_of(toward);
    if (!fi || !ti)
        throw DomainError("value-not-allowed", item.key + ": \"" + from + "\" / \"" + toward + "\"");
    const double mid = (static_cast<double>(*fi) + static_cast<double>(*ti)) / 2.0;
    std::size_t idx;
    if (*ti <= *fi)
        idx = static_cast<std::size_t>(std::floor(mid));  // round toward the lower target
    else
        idx = static_cast<std::size_t>(std::ceil(mid));
    return item.allowed_values[idx];
}

namespace {

void require_allowed(const ConstraintItem& item, const std::string& value, const char* what) {
    if (!item.allows(value))
        throw DomainError("value-not-allowed",
                          item.key + ": " + what + " \"" + value + "\" not in allowed_values");
}

}  // namespace

Vote cast_vote(const Appraisal& a, const Preference& own, const ConstraintItem& item,
               const std::string& current_value, int round) {
    require_allowed(item, current_value, "current value");
    require_allowed(item, own.value, "own value");

    const ToneBand tone = band_of(own.w);
    Vote v{VoteChoice::Agree, std::nullopt, "", tone};

    switch (a.strategy) {
        case Strategy::Accept:
        case Strategy::Yield:
            break;  // Agree as-is
        case Strategy::Push:
            v.vote = VoteChoice::Disagree;
            v.revised_value = own.value;
            break;
        case Strategy::Compromise: {
            if (item.kind == DomainKind::Ordinal) {
                auto oi = item.index_of(own.value);
                auto ci = item.index_of(current_value);
                const auto dist = *oi > *ci ? *oi - *ci : *ci - *oi;
                if (dist <= 1 && round >= 2) break;  // concede a one-step gap late in the debate
                v.vote = VoteChoice::Disagree;
                v.revised_value = middle_ground(item, current_value, own.value);
            } else {
                v.vote = VoteChoice::Disagree;
                v.revised_value = own.value;
            }
            break;
        }
    }
    v.rationale = vote_rationale(tone, v.vote, current_value, v.revised_value.value_or(""));
    return v;
}

Vote base_vote(const Preference& own, const ConstraintItem& item, const std::string& current_value,
               int round) {
    require_allowed(item, current_value, "current value");
    require_allowed(item, own.value, "own value");

    Vote v{VoteChoice::Agree, std::nullopt, "", ToneBand::Neutral};
    bool agree = current_value == own.value;
    if (!agree && item.kind == DomainKind::Ordinal && round >= 2) {
        auto oi = item.index_of(own.value);
        auto ci = item.index_of(current_value);
        const auto dist = *oi > *ci ? *oi - *ci : *ci - *oi;
        agree = dist <= 1;
    }
    if (!agree) {
        v.vote = VoteChoice::Disagree;
        v.revised_value = own.value;
    }
    v.rationale = vote_rationale(ToneBand::Neutral, v.vote, current_value, v.revised_value.value_or(""));
    return v;
}

namespace {

struct DissentStats {
    int dissenters = 0;
    // Modal revised value with earliest-voter tie-break.
    std::string modal_value;
    // Loudest dissenting voice (highest tone, earliest on a tie) and its ask.
    ToneBand top_tone = ToneBand::Neutral;
    std::string top_tone_value;
};

DissentStats dissent_stats(const std::vector<Vote>& votes) {
    DissentStats d;
    std::map<std::string, int> counts;
    std::vector<std::string> first_seen;  // dissent values in voter order
    bool have_top = false;
    for (const Vote& v : votes) {
        if (v.vote != VoteChoice::Disagree) continue;
        ++d.dissenters;
        if (!v.revised_value)
            throw DomainError("malformed-vote", "Disagree vote lacks revised_value");
        const std::string& rv = *v.revised_value;
        if (counts.emplace(rv, 0).second) first_seen.push_back(rv);
        ++counts[rv];
        if (!have_top || tone_level(v.tone) > tone_level(d.top_tone)) {
            d.top_tone = v.tone;
            d.top_tone_value = rv;
            have_top = true;
        }
    }
    int best = 0;
    for (const std::string& value : first_seen) {
        if (counts[value] > best) {
            best = counts[value];
            d.modal_value = value;
        }
    }
    return d;
}

}  // namespace

ProposerAction propose_update(const Preference& own, const std::string& current_value,
                              const std::vector<Vote>& votes, const ConstraintItem& item,
                              const PolicyConfig& cfg) {
    require_allowed(item, current_value, "current value");
    const DissentStats d = dissent_stats(votes);
    const double rate = votes.empty() ? 0.0 : static_cast<double>(d.dissenters) / votes.size();
    const ToneBand tone = band_of(own.w);

    auto finish = [&](ProposerMove move, std::string value) {
        return ProposerAction{move, value, action_rationale(tone, move, value), tone};
    };

    if (!cfg.appraisal_on()) {
        // Tone-blind proposer: move only under a strict dissent majority.
        if (rate > 0.5) return finish(ProposerMove::Update, d.modal_value);
        return finish(ProposerMove::Keep, current_value);
    }

    if (own.w.value() == 10) return finish(ProposerMove::Keep, current_value);
    if (rate <= 0.5) return finish(ProposerMove::Keep, current_value);

    // Majority pressure from here on: the proposer must move.
    if (d.dissenters > 0 && tone_level(d.top_tone) > tone_level(band_of(own.w)))
        return finish(ProposerMove::Update, d.top_tone_value);

    if (item.kind == DomainKind::Ordinal) {
        std::string mid = middle_ground(item, current_value, d.modal_value);
        // Landing exactly on the dissenters' ask is an adoption, not a split.
        if (mid == d.modal_value) return finish(ProposerMove::Update, mid);
        return finish(ProposerMove::Compromise, mid);
    }
    return finish(ProposerMove::Update, d.modal_value);
}

std::string proposal_rationale(ToneBand t, const std::string& value) {
    switch (t) {
        case ToneBand::Strict:
            return "I must insist on " + value + "; this point is non-negotiable for me.";
        case ToneBand::Firm:
            return "I feel strongly that " + value + " is the right call for this group.";
        case ToneBand::Warm:
            return "I would be glad to go with " + value + "; I think it suits everyone.";
        case ToneBand::Neutral:
            return "No strong feelings here; " + value + " works for me.";
    }
    return value;
}

std::string vote_rationale(ToneBand t, VoteChoice c, const std::string& current,
                           const std::string& revised) {
    if (c == VoteChoice::Agree) {
        switch (t) {
            case ToneBand::Strict: return current + " is exactly what I require.";
            case ToneBand::Firm: return current + " meets my needs; I support it.";
            case ToneBand::Warm: return current + " sounds good to me.";
            case ToneBand::Neutral: return "I am fine with " + current + ".";
        }
    }
    switch (t) {
        case ToneBand::Strict: return "I cannot accept " + current + "; it has to be " + revised + ".";
        case ToneBand::Firm: return "I have to disagree; " + revised + " is the better choice.";
        case ToneBand::Warm: return "Could we consider " + revised + " instead?";
        case ToneBand::Neutral: return "I would lean toward " + revised + ".";
    }
    return revised;
}

std::string action_rationale(ToneBand t, ProposerMove m, const std::string& value) {
    switch (m) {
        case ProposerMove::Keep:
            if (t == ToneBand::Strict) return "I am staying with " + value + "; this cannot change.";
            return "I will stay with " + value + " for now and hear further thoughts.";
        case ProposerMove::Update:
            return "I hear the objections; let us go with " + value + ".";
        case ProposerMove::Compromise:
            return "Let us meet in the middle at " + value + ".";
    }
    return value;
}

}  // namespace mind
