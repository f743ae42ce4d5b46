#include "mind/domain.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace mind {

namespace {

using nlohmann::json;

// Soft disagreement counts toward scenario viability only when every involved
// member holds the item at mid-band strength (w 6..8): that is what makes the
// conflict negotiable rather than trivial or deadlocked by construction.
bool qualifying_conflict(const ConstraintItem& item, const Scenario& s) {
    std::set<std::string> values;
    bool all_mid_band = true;
    for (const Persona& p : s.personas) {
        const Preference* pref = p.preference_for(item.key);
        if (!pref) return false;
        values.insert(pref->value);
        int w = pref->w.value();
        if (w < 6 || w > 8) all_mid_band = false;
    }
    return values.size() >= 2 && all_mid_band;
}

}  // namespace

int tone_level(ToneBand t) noexcept { return static_cast<int>(t); }

ToneBand tone_from_level(int level) {
    return static_cast<ToneBand>(std::clamp(level, 0, 3));
}

std::string_view tone_name(ToneBand t) noexcept {
    switch (t) {
        case ToneBand::Neutral: return "neutral";
        case ToneBand::Warm: return "warm";
        case ToneBand::Firm: return "firm";
        case ToneBand::Strict: return "strict";
    }
    return "neutral";
}

ToneBand tone_from_name(std::string_view name) {
    if (name == "neutral") return ToneBand::Neutral;
    if (name == "warm") return ToneBand::Warm;
    if (name == "firm") return ToneBand::Firm;
    if (name == "strict") return ToneBand::Strict;
    throw ParseError("bad-tone", "unknown tone name: " + std::string(name));
}

ToneBand band_of(Willingness w) noexcept {
    int v = w.value();
    if (v <= 3) return ToneBand::Neutral;
    if (v <= 6) return ToneBand::Warm;
    if (v <= 8) return ToneBand::Firm;
    return ToneBand::Strict;
}

bool ConstraintItem::allows(std::string_view value) const {
    return index_of(value).has_value();
}

std::optional<std::size_t> ConstraintItem::index_of(std::string_view value) const {
    for (std::size_t i = 0; i < allowed_values.size(); ++i)
        if (allowed_values[i] == value) return i;
    return std::nullopt;
}

const Preference* Persona::preference_for(std::string_view item_key) const {
    for (const Preference& p : preferences)
        if (p.item_key == item_key) return &p;
    return nullptr;
}

const ConstraintItem* Scenario::item(std::string_view key) const {
    for (const ConstraintItem& it : items)
        if (it.key == key) return &it;
    return nullptr;
}

bool ValidationReport::has(std::string_view code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (const Violation& v : violations) out << v.code << " (" << v.detail << "); ";
    return out.str();
}

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport report;
    auto flag = [&](std::string code, std::string detail) {
        report.violations.push_back({std::move(code), std::move(detail)});
    };

    if (s.personas.size() < 2 || s.personas.size() > 4)
        flag("group-size", "group must have 2..4 personas, has " + std::to_string(s.personas.size()));
    if (s.days <= 0) flag("invalid-trip", "days must be positive");
    if (s.people_number <= 0) flag("invalid-trip", "people_number must be positive");
    if (s.budget_anchor < 0.0) flag("invalid-trip", "budget_anchor must be non-negative");

    std::set<std::string> persona_ids;
    for (const Persona& p : s.personas)
        if (!persona_ids.insert(p.id).second) flag("duplicate-persona", p.id);

    std::set<std::string> item_keys;
    for (const ConstraintItem& item : s.items) {
        if (!item_keys.insert(item.key).second) flag("duplicate-item", item.key);
        if (item.key.find("__") == std::string::npos)
            flag("malformed-item", "key lacks category__item form: " + item.key);
        if (item.allowed_values.empty())
            flag("malformed-item", "empty allowed_values: " + item.key);
        std::set<std::string> vals(item.allowed_values.begin(), item.allowed_values.end());
        if (vals.size() != item.allowed_values.size())
            flag("malformed-item", "duplicate allowed_values: " + item.key);
    }

    for (const Persona& p : s.personas) {
        std::set<std::string> seen;
        for (const Preference& pref : p.preferences) {
            if (!seen.insert(pref.item_key).second)
                flag("duplicate-preference", p.id + " repeats " + pref.item_key);
            const ConstraintItem* item = s.item(pref.item_key);
            if (!item) {
                flag("dangling-preference", p.id + " references " + pref.item_key);
                continue;
            }
            if (!item->allows(pref.value))
                flag("invalid-value", p.id + " holds \"" + pref.value + "\" for " + pref.item_key);
        }
        for (const ConstraintItem& item : s.items)
            if (!p.preference_for(item.key))
                flag("missing-preference", p.id + " lacks a stance on " + item.key);
    }

    // Semantic rules below need complete, well-formed preference profiles.
    if (!report.ok()) {
        // Still check what we safely can: hard unanimity over present prefs.
    }

    int qualifying = 0;
    for (const ConstraintItem& item : s.items) {
        std::set<std::string> values;
        bool complete = true;
        for (const Persona& p : s.personas) {
            const Preference* pref = p.preference_for(item.key);
            if (!pref) {
                complete = false;
                continue;
            }
            values.insert(pref->value);
        }
        if (item.hard) {
            if (values.size() > 1) flag("hard-conflict", item.key);
        } else if (complete && qualifying_conflict(item, s)) {
            ++qualifying;
        }
    }
    if (qualifying < 3)
        flag("insufficient-conflicts",
             "need >= 3 negotiable soft conflicts, found " + std::to_string(qualifying));

    return report;
}

std::vector<std::string> soft_conflicts(const Scenario& s) {
    for (const Persona& p : s.personas)
        for (const Preference& pref : p.preferences)
            if (!s.item(pref.item_key))
                throw DomainError("dangling-preference", p.id + " references " + pref.item_key);

    std::vector<std::string> keys;
    for (const ConstraintItem& item : s.items) {
        if (item.hard) continue;
        std::set<std::string> values;
        for (const Persona& p : s.personas) {
            const Preference* pref = p.preference_for(item.key);
            if (pref) values.insert(pref->value);
        }
        if (values.size() >= 2) keys.push_back(item.key);
    }
    return keys;
}

namespace {

json attributes_to_json(const std::map<std::string, AttributeValue>& attrs) {
    json out = json::object();
    for (const auto& [key, value] : attrs) {
        if (std::holds_alternative<double>(value))
            out[key] = std::get<double>(value);
        else
            out[key] = std::get<std::string>(value);
    }
    return out;
}

std::map<std::string, AttributeValue> attributes_from_json(const json& j, const std::string& where) {
    std::map<std::string, AttributeValue> attrs;
    if (j.is_null()) return attrs;
    if (!j.is_object()) throw ParseError("bad-attributes", where);
    for (const auto& [key, value] : j.items()) {
        if (value.is_number())
            attrs[key] = value.get<double>();
        else if (value.is_string())
            attrs[key] = value.get<std::string>();
        else
            throw ParseError("bad-attributes", where + "." + key + " must be number or string");
    }
    return attrs;
}

const json& require(const json& j, const char* field, const std::string& where) {
    auto it = j.find(field);
    if (it == j.end())
        throw ParseError("missing-field", where + " lacks \"" + field + "\"");
    return *it;
}

}  // namespace

json scenario_to_json(const Scenario& s) {
    json items = json::array();
    for (const ConstraintItem& item : s.items) {
        items.push_back({{"key", item.key},
                         {"kind", item.kind == DomainKind::Ordinal ? "ordinal" : "categorical"},
                         {"allowed_values", item.allowed_values},
                         {"hard", item.hard}});
    }
    json personas = json::array();
    for (const Persona& p : s.personas) {
        json prefs = json::array();
        for (const Preference& pref : p.preferences)
            prefs.push_back({{"item", pref.item_key}, {"value", pref.value}, {"w", pref.w.value()}});
        personas.push_back(
            {{"id", p.id}, {"attributes", attributes_to_json(p.attributes)}, {"preferences", prefs}});
    }
    return {{"schema", kScenarioSchema},
            {"id", s.id},
            {"origin", s.origin},
            {"destination", s.destination},
            {"days", s.days},
            {"people_number", s.people_number},
            {"budget_anchor", s.budget_anchor},
            {"items", items},
            {"personas", personas}};
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("bad-scenario", "scenario must be a JSON object");
    if (require(j, "schema", "scenario").get<std::string>() != kScenarioSchema)
        throw ParseError("schema-mismatch",
                         "expected " + std::string(kScenarioSchema) + ", got " +
                             j["schema"].get<std::string>());

    Scenario s;
    s.id = require(j, "id", "scenario").get<std::string>();
    s.origin = require(j, "origin", "scenario").get<std::string>();
    s.destination = require(j, "destination", "scenario").get<std::string>();
    s.days = require(j, "days", "scenario").get<int>();
    s.people_number = require(j, "people_number", "scenario").get<int>();
    s.budget_anchor = require(j, "budget_anchor", "scenario").get<double>();

    for (const json& ij : require(j, "items", "scenario")) {
        ConstraintItem item;
        item.key = require(ij, "key", "item").get<std::string>();
        std::string kind = require(ij, "kind", item.key).get<std::string>();
        if (kind == "ordinal")
            item.kind = DomainKind::Ordinal;
        else if (kind == "categorical")
            item.kind = DomainKind::Categorical;
        else
            throw ParseError("bad-item-kind", item.key + ": " + kind);
        item.allowed_values = require(ij, "allowed_values", item.key).get<std::vector<std::string>>();
        item.hard = require(ij, "hard", item.key).get<bool>();
        s.items.push_back(std::move(item));
    }

    for (const json& pj : require(j, "personas", "scenario")) {
        Persona p;
        p.id = require(pj, "id", "persona").get<std::string>();
        p.attributes = attributes_from_json(pj.value("attributes", json()), p.id);
        for (const json& prj : require(pj, "preferences", p.id)) {
            Preference pref{require(prj, "item", p.id).get<std::string>(),
                            require(prj, "value", p.id).get<std::string>(),
                            Willingness(require(prj, "w", p.id).get<int>())};
            p.preferences.push_back(std::move(pref));
        }
        s.personas.push_back(std::move(p));
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("io-error", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("bad-json", path + ": " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("io-error", "cannot write " + path);
    out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace mind
