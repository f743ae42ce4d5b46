#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mind/domain.hpp"

namespace mind::test {

inline ConstraintItem make_item(std::string key, DomainKind kind,
                                std::vector<std::string> values, bool hard = false) {
    ConstraintItem item;
    item.key = std::move(key);
    item.kind = kind;
    item.allowed_values = std::move(values);
    item.hard = hard;
    return item;
}

inline Preference make_pref(std::string item_key, std::string value, int w) {
    return Preference{std::move(item_key), std::move(value), Willingness(w)};
}

inline Persona make_persona(std::string id, std::vector<Preference> prefs) {
    Persona p;
    p.id = std::move(id);
    p.preferences = std::move(prefs);
    return p;
}

inline Scenario make_scenario(std::string id, std::vector<Persona> personas,
                              std::vector<ConstraintItem> items) {
    Scenario s;
    s.id = std::move(id);
    s.personas = std::move(personas);
    s.items = std::move(items);
    s.origin = "Seattle";
    s.destination = "Tokyo";
    s.days = 5;
    s.people_number = static_cast<int>(s.personas.size());
    s.budget_anchor = 3000.0;
    return s;
}

// Three soft conflicts, every member at mid-band weight; passes validation.
inline Scenario valid_three_persona_scenario(const std::string& id = "unit-valid") {
    std::vector<ConstraintItem> items = {
        make_item("activity__pace", DomainKind::Ordinal, {"Relaxed", "Balanced", "Packed"}),
        make_item("food__cuisine", DomainKind::Categorical, {"Local", "International"}),
        make_item("lodging__area", DomainKind::Categorical, {"Center", "Suburbs"}),
    };
    std::vector<Persona> personas = {
        make_persona("ana", {make_pref("activity__pace", "Relaxed", 6),
                             make_pref("food__cuisine", "Local", 7),
                             make_pref("lodging__area", "Center", 6)}),
        make_persona("ben", {make_pref("activity__pace", "Packed", 7),
                             make_pref("food__cuisine", "International", 6),
                             make_pref("lodging__area", "Center", 8)}),
        make_persona("cleo", {make_pref("activity__pace", "Balanced", 8),
                              make_pref("food__cuisine", "Local", 6),
                              make_pref("lodging__area", "Suburbs", 7)}),
    };
    return make_scenario(id, std::move(personas), std::move(items));
}

inline std::filesystem::path fresh_temp_dir(const std::string& label) {
    static std::mt19937_64 rng(std::random_device{}());
    std::ostringstream name;
    name << "mind-test-" << label << "-" << std::hex << rng();
    std::filesystem::path dir = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::string repo_path(const std::string& relative) {
    return std::string(MIND_REPO_DIR) + "/" + relative;
}

}  // namespace mind::test
