#include "mind/forge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "mind/rng.hpp"

namespace mind {

using nlohmann::json;

CandidatePool CandidatePool::build(std::vector<Persona> personas) {
    CandidatePool pool;
    std::set<std::string> keys;
    for (const Persona& p : personas)
        for (const auto& [key, value] : p.attributes) keys.insert(key);
    pool.feature_keys.assign(keys.begin(), keys.end());

    for (const Persona& p : personas) {
        std::vector<double> vec;
        vec.reserve(pool.feature_keys.size());
        for (const std::string& key : pool.feature_keys) {
            auto it = p.attributes.find(key);
            if (it == p.attributes.end()) {
                vec.push_back(0.0);
            } else if (std::holds_alternative<double>(it->second)) {
                vec.push_back(std::get<double>(it->second));
            } else {
                // Stable text embedding into [0,1): enough to separate labels.
                vec.push_back(static_cast<double>(fnv1a64(std::get<std::string>(it->second)) % 10007) /
                              10007.0);
            }
        }
        pool.features.push_back(std::move(vec));
    }
    pool.personas = std::move(personas);
    return pool;
}

std::vector<double> pool_centroid(const CandidatePool& pool) {
    std::vector<double> c(pool.feature_dim(), 0.0);
    if (pool.personas.empty()) return c;
    for (const std::vector<double>& f : pool.features)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += f[i];
    for (double& v : c) v /= static_cast<double>(pool.features.size());
    return c;
}

namespace {

double norm(const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double cosine(const std::vector<double>& a, const std::vector<double>& b, double na, double nb) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / (na * nb);
}

}  // namespace

std::vector<std::string> mmr_select(const CandidatePool& pool, const std::vector<double>& query,
                                    std::size_t k, double lambda) {
    if (k > pool.personas.size())
        throw DomainError("pool-exhausted", "asked for " + std::to_string(k) + " of " +
                                                std::to_string(pool.personas.size()));
    if (query.size() != pool.feature_dim())
        throw DomainError("dimension-mismatch", "query dimension does not match the pool");

    const double nq = norm(query);
    if (nq == 0.0) throw DomainError("degenerate-feature", "query vector is all zeros");
    std::vector<double> norms(pool.personas.size());
    for (std::size_t i = 0; i < pool.features.size(); ++i) {
        norms[i] = norm(pool.features[i]);
        if (norms[i] == 0.0)
            throw DomainError("degenerate-feature", pool.personas[i].id + " has an all-zero vector");
    }

    std::vector<double> relevance(pool.personas.size());
    for (std::size_t i = 0; i < pool.features.size(); ++i)
        relevance[i] = cosine(pool.features[i], query, norms[i], nq);

    std::vector<std::string> picked;
    std::vector<std::size_t> picked_idx;
    std::vector<bool> used(pool.personas.size(), false);
    // max similarity to the already-picked set; 0 while the set is empty
    std::vector<double> redundancy(pool.personas.size(), 0.0);

    for (std::size_t step = 0; step < k; ++step) {
        std::size_t best = pool.personas.size();
        double best_score = 0.0;
        for (std::size_t i = 0; i < pool.personas.size(); ++i) {
            if (used[i]) continue;
            const double score = lambda * relevance[i] - (1.0 - lambda) * redundancy[i];
            if (best == pool.personas.size() || score > best_score) {
                best = i;
                best_score = score;
            }
        }
        used[best] = true;
        picked.push_back(pool.personas[best].id);
        picked_idx.push_back(best);
        for (std::size_t i = 0; i < pool.personas.size(); ++i) {
            if (used[i]) continue;
            const double sim = cosine(pool.features[i], pool.features[best], norms[i], norms[best]);
            redundancy[i] = std::max(redundancy[i], sim);
        }
    }
    return picked;
}

MoscowCategory moscow_from_name(std::string_view name) {
    if (name == "must") return MoscowCategory::Must;
    if (name == "should") return MoscowCategory::Should;
    if (name == "could") return MoscowCategory::Could;
    if (name == "wont") return MoscowCategory::Wont;
    throw ParseError("bad-moscow", std::string(name));
}

std::string_view moscow_name(MoscowCategory c) noexcept {
    switch (c) {
        case MoscowCategory::Must: return "must";
        case MoscowCategory::Should: return "should";
        case MoscowCategory::Could: return "could";
        case MoscowCategory::Wont: return "wont";
    }
    return "could";
}

Willingness derive_willingness(const MoscowLabel& label) {
    if (std::isnan(label.salience))
        throw DomainError("bad-salience", "salience must be a finite number");
    const double s = std::clamp(label.salience, 0.0, 1.0);
    const auto half_up = [](double x) { return static_cast<int>(std::floor(x + 0.5)); };
    int w = 0;
    switch (label.label) {
        case MoscowCategory::Must: w = 9 + half_up(s); break;
        case MoscowCategory::Should: w = 6 + half_up(2.0 * s); break;
        case MoscowCategory::Could: w = 4 + half_up(s); break;
        case MoscowCategory::Wont: w = 1 + half_up(2.0 * s); break;
    }
    return Willingness(w);
}

double default_salience(const Persona& p) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [key, value] : p.attributes) {
        if (std::holds_alternative<double>(value)) {
            sum += std::abs(std::get<double>(value));
            ++n;
        }
    }
    if (n == 0) return 0.5;
    const double mean = sum / static_cast<double>(n);
    return mean / (1.0 + mean);
}

ForgeResult form_groups(const CandidatePool& pool, const std::vector<ConstraintItem>& items,
                        const TripInfo& trip, const ForgeOptions& opts) {
    if (opts.group_size < 2 || opts.group_size > 4)
        throw DomainError("group-size", "group_size must be 2..4");
    ForgeResult result;
    if (static_cast<std::size_t>(opts.group_size) > pool.personas.size()) {
        result.rejections["pool-exhausted"] = 0;
        return result;
    }

    Rng rng(opts.seed);
    std::set<std::vector<std::size_t>> seen;
    int since_last_accept = 0;

    while (static_cast<int>(result.scenarios.size()) < opts.max_groups &&
           since_last_accept < opts.attempt_cap) {
        ++result.attempts;
        ++since_last_accept;

        // Partial Fisher-Yates draw of group_size distinct indices.
        std::vector<std::size_t> indices(pool.personas.size());
        std::iota(indices.begin(), indices.end(), 0);
        std::vector<std::size_t> chosen;
        for (int j = 0; j < opts.group_size; ++j) {
            const std::size_t pick = j + rng.uniform_index(indices.size() - j);
            std::swap(indices[j], indices[pick]);
            chosen.push_back(indices[j]);
        }
        std::sort(chosen.begin(), chosen.end());  // keep pool order inside the group

        if (!seen.insert(chosen).second) {
            ++result.rejections["duplicate-group"];
            continue;
        }

        Scenario s;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "forge-%04zu", result.scenarios.size() + 1);
        s.id = buf;
        s.origin = trip.origin;
        s.destination = trip.destination;
        s.days = trip.days;
        s.budget_anchor = trip.budget_anchor;
        s.people_number = opts.group_size;
        s.items = items;
        for (std::size_t idx : chosen) s.personas.push_back(pool.personas[idx]);
        // Members may carry stances on items outside this scenario's slice.
        for (Persona& p : s.personas) {
            std::erase_if(p.preferences, [&](const Preference& pref) {
                return s.item(pref.item_key) == nullptr;
            });
        }

        ValidationReport report = validate_scenario(s);
        if (!report.ok()) {
            std::set<std::string> codes;
            for (const Violation& v : report.violations) codes.insert(v.code);
            for (const std::string& code : codes) ++result.rejections[code];
            continue;
        }
        result.scenarios.push_back(std::move(s));
        since_last_accept = 0;
    }
    return result;
}

namespace {

TripInfo trip_from_json(const json& j) {
    TripInfo t;
    t.origin = j.value("origin", t.origin);
    t.destination = j.value("destination", t.destination);
    t.days = j.value("days", t.days);
    t.budget_anchor = j.value("budget_anchor", t.budget_anchor);
    return t;
}

}  // namespace

PoolFile pool_from_json(const json& j, const SalienceHook& hook) {
    if (j.value("schema", "") != kPoolSchema)
        throw ParseError("schema-mismatch", "expected " + std::string(kPoolSchema));
    PoolFile pool;
    if (j.contains("trip")) pool.trip = trip_from_json(j.at("trip"));

    for (const json& ij : j.at("items")) {
        ConstraintItem item;
        item.key = ij.at("key").get<std::string>();
        const std::string kind = ij.at("kind").get<std::string>();
        if (kind == "ordinal")
            item.kind = DomainKind::Ordinal;
        else if (kind == "categorical")
            item.kind = DomainKind::Categorical;
        else
            throw ParseError("bad-item-kind", item.key + ": " + kind);
        item.allowed_values = ij.at("allowed_values").get<std::vector<std::string>>();
        item.hard = ij.value("hard", false);
        pool.items.push_back(std::move(item));
    }

    for (const json& pj : j.at("personas")) {
        Persona p;
        p.id = pj.at("id").get<std::string>();
        if (pj.contains("attributes")) {
            for (const auto& [key, value] : pj.at("attributes").items()) {
                if (value.is_number())
                    p.attributes[key] = value.get<double>();
                else if (value.is_string())
                    p.attributes[key] = value.get<std::string>();
                else
                    throw ParseError("bad-attributes", p.id + "." + key);
            }
        }
        for (const json& prj : pj.at("preferences")) {
            const std::string item_key = prj.at("item").get<std::string>();
            const std::string value = prj.at("value").get<std::string>();
            int w;
            if (prj.contains("w")) {
                w = prj.at("w").get<int>();
            } else if (prj.contains("moscow")) {
                MoscowLabel label;
                label.label = moscow_from_name(prj.at("moscow").get<std::string>());
                if (prj.contains("salience"))
                    label.salience = prj.at("salience").get<double>();
                else if (hook)
                    label.salience = hook(p, item_key);
                else
                    label.salience = default_salience(p);
                w = derive_willingness(label).value();
            } else {
                throw ParseError("missing-field", p.id + "/" + item_key + " needs \"w\" or \"moscow\"");
            }
            p.preferences.push_back({item_key, value, Willingness(w)});
        }
        pool.personas.push_back(std::move(p));
    }
    return pool;
}

PoolFile load_pool(const std::string& path, const SalienceHook& hook) {
    std::ifstream in(path);
    if (!in) throw ParseError("io-error", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("bad-json", path + ": " + e.what());
    }
    return pool_from_json(j, hook);
}

json pool_to_json(const PoolFile& pool) {
    json items = json::array();
    for (const ConstraintItem& item : pool.items)
        items.push_back({{"key", item.key},
                         {"kind", item.kind == DomainKind::Ordinal ? "ordinal" : "categorical"},
                         {"allowed_values", item.allowed_values},
                         {"hard", item.hard}});
    json personas = json::array();
    for (const Persona& p : pool.personas) {
        json attrs = json::object();
        for (const auto& [key, value] : p.attributes) {
            if (std::holds_alternative<double>(value))
                attrs[key] = std::get<double>(value);
            else
                attrs[key] = std::get<std::string>(value);
        }
        json prefs = json::array();
        for (const Preference& pref : p.preferences)
            prefs.push_back({{"item", pref.item_key}, {"value", pref.value}, {"w", pref.w.value()}});
        personas.push_back({{"id", p.id}, {"attributes", attrs}, {"preferences", prefs}});
    }
    return {{"schema", kPoolSchema},
            {"trip",
             {{"origin", pool.trip.origin},
              {"destination", pool.trip.destination},
              {"days", pool.trip.days},
              {"budget_anchor", pool.trip.budget_anchor}}},
            {"items", items},
            {"personas", personas}};
}

}  // namespace mind
