#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "uaseg/grid.hpp"

namespace uaseg {

enum class WeatherKind { fog, rain, snow };

std::string_view to_string(WeatherKind kind);
WeatherKind weather_kind_from_string(std::string_view name);

// Corruption request: strength 0 is the identity transform, strength 1 a
// fully obscured image. The seed drives streak/flake placement.
struct WeatherSpec {
    WeatherKind kind = WeatherKind::fog;
    double strength = 0.0;
    std::uint64_t seed = 0;
};

// Applies the requested corruption. Output has the input's dimensions, all
// channels stay in [0,1], and equal (img, spec) give bit-identical results.
// Occlusion sets at a fixed seed are prefixes across increasing strength,
// so the count of modified pixels is nondecreasing in strength.
// Throws InvalidParameterError if strength is outside [0,1].
RasterImage apply_weather(const RasterImage& img, const WeatherSpec& spec);

// Draws kind uniformly over {fog, rain, snow} and strength uniformly on
// [0,1], deterministically from the seed. The returned spec reuses the seed.
WeatherSpec sample_weather(std::uint64_t seed);

} // namespace uaseg
