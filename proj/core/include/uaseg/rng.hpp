#pragma once

#include <cstdint>
#include <string_view>

namespace uaseg {

// Master seed plus the per-item derivation rule. Every random stream in the
// library is keyed by derive_seed(spec, item_id) so batch jobs stay
// reproducible file by file, at any level of parallelism.
struct SeedSpec {
    std::uint64_t master_seed = 0;
};

// 64-bit finalizing mixer (splitmix64 variant); full avalanche, no state.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic, platform-independent seed for one named item. FNV-1a over
// the UTF-8 id bytes, keyed by the mixed master seed and finalized with
// mix64; collision-resistant at corpus scale (thousands of ids).
std::uint64_t derive_seed(SeedSpec spec, std::string_view item_id);

// Small deterministic generator used for all sampling in the library.
// std::* distributions are implementation-defined, so uniform values are
// produced from raw bits here instead.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1) with 53 random mantissa bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [lo,hi).
    double next_double(double lo, double hi) { return lo + next_double() * (hi - lo); }

    // Uniform integer in [0,n); n must be >= 1.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

} // namespace uaseg
