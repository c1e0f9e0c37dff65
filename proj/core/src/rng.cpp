#include "uaseg/rng.hpp"

namespace uaseg {

std::uint64_t derive_seed(SeedSpec spec, std::string_view item_id) {
    // FNV-1a offset basis, keyed by the mixed master seed.
    std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(spec.master_seed);
    for (unsigned char byte : item_id) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

} // namespace uaseg
