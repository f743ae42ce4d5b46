#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/errors.hpp"

namespace mind {

// Hidden negotiation weight, integer 1..10. The numeric value is private to
// the agent holding it; everything other agents observe goes through ToneBand.
class Willingness {
public:
    explicit Willingness(int value) : value_(value) {
        if (value < 1 || value > 10)
            throw DomainError("willingness-range", "w must be in [1,10], got " + std::to_string(value));
    }

    int value() const noexcept { return value_; }
    auto operator<=>(const Willingness&) const = default;

private:
    int value_;
};

// Publicly expressible stance, ordered by escalation level.
enum class ToneBand { Neutral = 0, Warm = 1, Firm = 2, Strict = 3 };

int tone_level(ToneBand t) noexcept;
ToneBand tone_from_level(int level);  // clamps into [0,3]
std::string_view tone_name(ToneBand t) noexcept;
ToneBand tone_from_name(std::string_view name);

// Band an agent's hidden weight maps to: 1-3 Neutral, 4-6 Warm, 7-8 Firm,
// 9-10 Strict.
ToneBand band_of(Willingness w) noexcept;

enum class DomainKind { Ordinal, Categorical };

// One negotiable slot of the plan, e.g. "restaurant__price".
struct ConstraintItem {
    std::string key;                          // "category__item"
    DomainKind kind = DomainKind::Categorical;
    std::vector<std::string> allowed_values;  // non-empty, duplicate-free
    bool hard = false;                        // hard items are never negotiated

    bool allows(std::string_view value) const;
    // Position of a value in the ordered domain; nullopt when absent.
    std::optional<std::size_t> index_of(std::string_view value) const;
};

// A persona's stance on one item. value must come verbatim from the item's
// allowed_values; w stays hidden during negotiation.
struct Preference {
    std::string item_key;
    std::string value;
    Willingness w;
};

using AttributeValue = std::variant<double, std::string>;

struct Persona {
    std::string id;
    std::map<std::string, AttributeValue> attributes;
    std::vector<Preference> preferences;  // at most one per item_key

    const Preference* preference_for(std::string_view item_key) const;
};

// A complete negotiation setting: a small group plus the constraint items
// they must settle, with enough planted disagreement to make talking worth it.
struct Scenario {
    std::string id;
    std::vector<Persona> personas;  // 2..4
    std::vector<ConstraintItem> items;
    std::string origin;
    std::string destination;
    int days = 1;
    int people_number = 1;
    double budget_anchor = 0.0;

    const ConstraintItem* item(std::string_view key) const;
};

struct Violation {
    std::string code;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has(std::string_view code) const;
    std::string summary() const;
};

// Structural and semantic checks; a scenario with an empty report is
// guaranteed runnable. Codes: group-size, duplicate-persona, malformed-item,
// duplicate-item, invalid-trip, duplicate-preference, dangling-preference,
// invalid-value, missing-preference, hard-conflict, insufficient-conflicts.
ValidationReport validate_scenario(const Scenario& s);

// Keys of soft items on which at least two members disagree, in item order.
// Throws DomainError("dangling-preference") on unknown item keys.
std::vector<std::string> soft_conflicts(const Scenario& s);

inline constexpr std::string_view kScenarioSchema = "mind-scenario/1";

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace mind
