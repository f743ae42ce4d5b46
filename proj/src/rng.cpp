#include "mind/rng.hpp"

#include <limits>

namespace mind {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) return 0;
    const std::uint64_t span = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = span - span % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
}

double Rng::uniform_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_item_seed(std::uint64_t run_seed, std::string_view scenario_id,
                               std::string_view item_key) {
    std::uint64_t h = fnv1a64(scenario_id);
    h = fnv1a64(item_key, h ^ 0x9e3779b97f4a7c15ull);
    // Mix the run seed through one more FNV round so nearby seeds diverge.
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((run_seed >> (8 * i)) & 0xff);
    return fnv1a64(std::string_view(buf, 8), h);
}

}  // namespace mind
