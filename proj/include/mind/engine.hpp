#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/domain.hpp"
#include "mind/policy.hpp"

namespace mind {

enum class EventKind { Proposal, Appraisal, Vote, ProposerAction, Resolution, Degradation };

std::string_view event_kind_name(EventKind k) noexcept;
EventKind event_kind_from_name(std::string_view name);

// One line of the negotiation record. Events marked hidden (appraisals,
// degradation notes) are never shown to other agents and never leave the
// machine-readable log; visible events carry no numeric weights.
struct TranscriptEvent {
    std::uint64_t seq = 0;
    std::string scenario_id;
    std::string item_key;
    int round = 0;  // 0 for opening proposals
    std::string actor;
    EventKind kind = EventKind::Proposal;
    bool hidden = false;
    nlohmann::json payload;
};

struct Resolution {
    bool fallback = false;
    int round = 0;  // consensus round for debate outcomes; unset for fallback
};

struct AgentOutcome {
    std::string id;
    std::string initial_value;
    int w = 1;
    bool matched = false;
};

struct ItemOutcome {
    std::string scenario_id;
    std::string item_key;
    std::string final_value;
    Resolution resolution;
    bool hard = false;
    std::string proposer;  // empty for hard items (nothing was debated)
    std::vector<AgentOutcome> agents;
    std::vector<std::string> top_agents;  // ids holding the maximal weight
};

// Opening statement produced by a policy for phase 1.
struct ProposalRecord {
    std::string value;
    std::string rationale;
    ToneBand tone = ToneBand::Neutral;
};

// Everything a policy may look at when producing one turn. Raw pointers are
// non-owning views into engine state, valid only for the duration of the call.
struct TurnContext {
    const Scenario* scenario = nullptr;
    const ConstraintItem* item = nullptr;
    const Persona* agent = nullptr;
    const Preference* own = nullptr;
    std::string current_value;
    int round = 0;
    ToneBand proposer_tone = ToneBand::Neutral;
    ToneBand own_display_tone = ToneBand::Neutral;
    const PolicyConfig* cfg = nullptr;
    const std::vector<TranscriptEvent>* history = nullptr;  // this item's events so far
};

// Behaviour of a single agent. The engine drives the protocol; the policy
// decides contents. Policies may queue degradation notes (e.g. a model reply
// that had to be discarded) which the engine drains into hidden events.
class AgentPolicy {
public:
    virtual ~AgentPolicy() = default;
    virtual ProposalRecord phase1(const TurnContext& ctx) = 0;
    virtual std::optional<Appraisal> appraise_turn(const TurnContext& ctx) = 0;
    virtual Vote vote_turn(const TurnContext& ctx, const std::optional<Appraisal>& appraisal) = 0;
    virtual ProposerAction update_turn(const TurnContext& ctx, const std::vector<Vote>& votes) = 0;

    std::vector<std::string> take_notes();

protected:
    void note(std::string text) { notes_.push_back(std::move(text)); }

private:
    std::vector<std::string> notes_;
};

// Deterministic policy implementing the tone/appraisal rules directly.
class RulePolicy final : public AgentPolicy {
public:
    ProposalRecord phase1(const TurnContext& ctx) override;
    std::optional<Appraisal> appraise_turn(const TurnContext& ctx) override;
    Vote vote_turn(const TurnContext& ctx, const std::optional<Appraisal>& appraisal) override;
    ProposerAction update_turn(const TurnContext& ctx, const std::vector<Vote>& votes) override;
};

// Consensus passes when the proposer's implicit assent plus explicit Agree
// votes reach tau of the whole group. votes must hold exactly group_size - 1
// ballots (everyone but the proposer).
bool check_consensus(const std::vector<Vote>& votes, int group_size, double tau);

// Deadlock resolution: the value of the agent with the highest hidden weight,
// earliest agent winning ties.
std::string fallback_value(const std::vector<std::pair<std::string, Preference>>& prefs);

struct ItemRun {
    ItemOutcome outcome;
    std::vector<TranscriptEvent> events;
};

struct ScenarioRun {
    std::vector<ItemOutcome> outcomes;
    std::vector<TranscriptEvent> events;
};

// Negotiate one soft item: opening proposals, a seeded draw of the standing
// proposal (its author chairs the item), then up to cfg.max_rounds voting
// rounds with proposer updates in between, then fallback.
ItemRun run_item(const Scenario& s, const ConstraintItem& item, const PolicyConfig& cfg,
                 std::uint64_t seed, AgentPolicy& policy);

// Run a whole validated scenario: hard items resolve to their unanimous value
// without debate; each soft item is negotiated under its own derived seed.
ScenarioRun run_scenario(const Scenario& s, const PolicyConfig& cfg, std::uint64_t run_seed,
                         AgentPolicy& policy);

inline constexpr std::string_view kTranscriptSchema = "mind-transcript/1";
inline constexpr std::string_view kOutcomesSchema = "mind-outcomes/1";

nlohmann::json event_to_json(const TranscriptEvent& e);
TranscriptEvent event_from_json(const nlohmann::json& j);
void write_transcript(const std::string& path, const std::vector<TranscriptEvent>& events);
std::vector<TranscriptEvent> read_transcript(const std::string& path);

nlohmann::json outcomes_to_json(const std::vector<ItemOutcome>& outcomes);
std::vector<ItemOutcome> outcomes_from_json(const nlohmann::json& j);
void write_outcomes(const std::string& path, const std::vector<ItemOutcome>& outcomes);
std::vector<ItemOutcome> read_outcomes(const std::string& path);

}  // namespace mind
