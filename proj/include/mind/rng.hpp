#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mind {

// 64-bit FNV-1a. Used wherever a platform-stable hash is needed (seed
// derivation, fixture keys). std::hash is deliberately avoided: its output is
// implementation-defined and would break cross-platform reproducibility.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull);

// Deterministic RNG facade. std::mt19937_64 has a standard-specified output
// sequence; the distribution helpers below avoid std::uniform_*_distribution,
// whose mapping from engine output to values is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw from [0, n). Rejection sampling keeps the draw unbiased.
    std::size_t uniform_index(std::size_t n);

    // Uniform draw from [0, 1) with 53 bits of precision.
    double uniform_real();

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Seed for one negotiation item, derived so that adding or removing other
// items (or scenarios) never perturbs this item's trace.
std::uint64_t derive_item_seed(std::uint64_t run_seed, std::string_view scenario_id,
                               std::string_view item_key);

}  // namespace mind
