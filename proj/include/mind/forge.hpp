#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/domain.hpp"

namespace mind {

// Persona shortlist with numeric feature vectors derived deterministically
// from attributes: numeric attributes pass through, text attributes hash into
// [0,1), missing keys contribute 0. All vectors share one dimension.
struct CandidatePool {
    std::vector<Persona> personas;
    std::vector<std::string> feature_keys;          // sorted union of attribute keys
    std::vector<std::vector<double>> features;      // one vector per persona

    std::size_t feature_dim() const { return feature_keys.size(); }
    static CandidatePool build(std::vector<Persona> personas);
};

std::vector<double> pool_centroid(const CandidatePool& pool);

// Greedy maximal-marginal-relevance pick of k persona ids: each step takes the
// candidate maximizing lambda*sim(p, query) - (1-lambda)*max sim(p, selected)
// under cosine similarity, earliest index winning ties. Deterministic; the
// first j picks of a k-pick run equal a j-pick run. Throws
// DomainError("degenerate-feature") on any all-zero vector.
std::vector<std::string> mmr_select(const CandidatePool& pool, const std::vector<double>& query,
                                    std::size_t k, double lambda = 0.7);

enum class MoscowCategory { Must, Should, Could, Wont };

MoscowCategory moscow_from_name(std::string_view name);
std::string_view moscow_name(MoscowCategory c) noexcept;

struct MoscowLabel {
    MoscowCategory label = MoscowCategory::Could;
    double salience = 0.5;  // in [0,1]
};

// Priority label to hidden weight: Must -> 9..10, Should -> 6..8,
// Could -> 4..5, Wont -> 1..3, salience steering position within the band.
Willingness derive_willingness(const MoscowLabel& label);

// Desk-scale salience stand-in when a pool entry gives none: a squash of the
// persona's mean absolute numeric attribute. Hook point for richer synthesis.
double default_salience(const Persona& p);
using SalienceHook = std::function<double(const Persona&, const std::string& item_key)>;

struct TripInfo {
    std::string origin = "Seattle";
    std::string destination = "Tokyo";
    int days = 5;
    double budget_anchor = 3000.0;
};

struct ForgeOptions {
    int group_size = 3;
    int max_groups = 10;
    std::uint64_t seed = 0;
    int attempt_cap = 10000;  // consecutive failed samples before giving up
};

struct ForgeResult {
    std::vector<Scenario> scenarios;
    std::map<std::string, int> rejections;  // violation code -> rejected attempts
    int attempts = 0;
};

// Seeded rejection sampling over persona subsets: draw a group, assemble a
// scenario over `items`, keep it only when validation passes. Deterministic
// for a given pool order and seed; duplicate groups are skipped.
ForgeResult form_groups(const CandidatePool& pool, const std::vector<ConstraintItem>& items,
                        const TripInfo& trip, const ForgeOptions& opts);

inline constexpr std::string_view kPoolSchema = "mind-pool/1";

// A candidate pool file: trip metadata, constraint items, personas whose
// preferences carry either explicit weights or MoSCoW labels (resolved via
// derive_willingness at load, salience defaulting to default_salience or the
// installed hook).
struct PoolFile {
    TripInfo trip;
    std::vector<ConstraintItem> items;
    std::vector<Persona> personas;
};

PoolFile pool_from_json(const nlohmann::json& j, const SalienceHook& hook = nullptr);
PoolFile load_pool(const std::string& path, const SalienceHook& hook = nullptr);
nlohmann::json pool_to_json(const PoolFile& pool);

}  // namespace mind
