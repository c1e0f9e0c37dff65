#include "uaseg/weather.hpp"

#include <cmath>

#include "uaseg/rng.hpp"

namespace uaseg {
namespace {

constexpr double kFogColor = 0.9;
constexpr double kRainBrightness = 0.35;
constexpr double kRainDensity = 0.004;  // streaks per pixel at strength 1
constexpr double kSnowColor = 0.96;
constexpr double kSnowDensity = 0.008;  // flakes per pixel at strength 1
constexpr double kSnowLift = 0.1;
constexpr double kPi = 3.14159265358979323846;

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

void splat_bilinear(Grid<double>& cov, double row, double col, double w) {
    const int i0 = static_cast<int>(std::floor(row));
    const int j0 = static_cast<int>(std::floor(col));
    const double fr = row - i0;
    const double fc = col - j0;
    const auto add = [&](int i, int j, double v) {
        if (i >= 0 && i < cov.height() && j >= 0 && j < cov.width()) cov.at(i, j) += v;
    };
    add(i0, j0, w * (1.0 - fr) * (1.0 - fc));
    add(i0, j0 + 1, w * (1.0 - fr) * fc);
    add(i0 + 1, j0, w * fr * (1.0 - fc));
    add(i0 + 1, j0 + 1, w * fr * fc);
}

// out = in + a*(fog - in): a single rounded product per channel, so the
// per-pixel deviation is monotone in the strength.
RasterImage apply_fog(const RasterImage& img, double strength) {
    RasterImage out(img.height(), img.width());
    const auto& in = img.channels();
    auto& dst = out.channels();
    for (std::size_t idx = 0; idx < in.size(); ++idx)
        dst[idx] = clamp01(in[idx] + strength * (kFogColor - in[idx]));
    return out;
}

// Streak parameters are drawn in a fixed per-streak order from one stream,
// so the streak set at a lower strength is a prefix of the set at a higher
// strength with the same seed.
RasterImage apply_rain(const RasterImage& img, double strength, std::uint64_t seed) {
    const int h = img.height(), w = img.width();
    const long streaks =
        std::lround(strength * kRainDensity * static_cast<double>(h) * static_cast<double>(w));

    Grid<double> cov(h, w, 0.0);
    SplitMix64 rng(derive_seed(SeedSpec{seed}, "weather.place"));
    for (long s = 0; s < streaks; ++s) {
        const double r0 = rng.next_double(0.0, h);
        const double c0 = rng.next_double(0.0, w);
        const double len = rng.next_double(8.0, 20.0);
        const double angle = rng.next_double(70.0, 110.0) * kPi / 180.0;
        const double dr = std::sin(angle);
        const double dc = std::cos(angle);
        for (double t = 0.0; t <= len; t += 0.25)
            splat_bilinear(cov, r0 + t * dr, c0 + t * dc, 0.25);
    }

    RasterImage out(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double lift = kRainBrightness * std::min(1.0, cov.at(i, j));
            for (int c = 0; c < 3; ++c)
                out.at(i, j, c) = std::min(1.0, img.at(i, j, c) + lift);
        }
    return out;
}

RasterImage apply_snow(const RasterImage& img, double strength, std::uint64_t seed) {
    const int h = img.height(), w = img.width();
    const long flakes =
        std::lround(strength * kSnowDensity * static_cast<double>(h) * static_cast<double>(w));

    Grid<double> cov(h, w, 0.0);
    SplitMix64 rng(derive_seed(SeedSpec{seed}, "weather.place"));
    for (long s = 0; s < flakes; ++s) {
        const double r0 = rng.next_double(0.0, h);
        const double c0 = rng.next_double(0.0, w);
        const double radius = rng.next_double(1.0, 3.0);
        const int lo_i = static_cast<int>(std::floor(r0 - radius));
        const int hi_i = static_cast<int>(std::ceil(r0 + radius));
        const int lo_j = static_cast<int>(std::floor(c0 - radius));
        const int hi_j = static_cast<int>(std::ceil(c0 + radius));
        for (int i = std::max(0, lo_i); i <= std::min(h - 1, hi_i); ++i)
            for (int j = std::max(0, lo_j); j <= std::min(w - 1, hi_j); ++j) {
                const double d2 = (i - r0) * (i - r0) + (j - c0) * (j - c0);
                const double falloff = 1.0 - d2 / (radius * radius);
                if (falloff > 0.0) cov.at(i, j) += 0.85 * falloff;
            }
    }

    const double lift = kSnowLift * strength;
    RasterImage out(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double blend = std::min(1.0, cov.at(i, j));
            for (int c = 0; c < 3; ++c) {
                const double lifted = std::min(1.0, img.at(i, j, c) + lift);
                out.at(i, j, c) = clamp01(lifted + blend * (kSnowColor - lifted));
            }
        }
    return out;
}

} // namespace

std::string_view to_string(WeatherKind kind) {
    switch (kind) {
    case WeatherKind::fog: return "fog";
    case WeatherKind::rain: return "rain";
    case WeatherKind::snow: return "snow";
    }
    return "fog";
}

WeatherKind weather_kind_from_string(std::string_view name) {
    if (name == "fog") return WeatherKind::fog;
    if (name == "rain") return WeatherKind::rain;
    if (name == "snow") return WeatherKind::snow;
    throw InvalidParameterError("unknown weather kind '" + std::string(name) + "'");
}

RasterImage apply_weather(const RasterImage& img, const WeatherSpec& spec) {
    if (!(spec.strength >= 0.0 && spec.strength <= 1.0))
        throw InvalidParameterError("weather strength must lie in [0,1], got " +
                                    std::to_string(spec.strength));
    if (spec.strength == 0.0) return img;

    switch (spec.kind) {
    case WeatherKind::fog: return apply_fog(img, spec.strength);
    case WeatherKind::rain: return apply_rain(img, spec.strength, spec.seed);
    case WeatherKind::snow: return apply_snow(img, spec.strength, spec.seed);
    }
    throw InvalidParameterError("unknown weather kind");
}

WeatherSpec sample_weather(std::uint64_t seed) {
    SplitMix64 rng(derive_seed(SeedSpec{seed}, "weather.sample"));
    WeatherSpec spec;
    switch (rng.next_below(3)) {
    case 0: spec.kind = WeatherKind::fog; break;
    case 1: spec.kind = WeatherKind::rain; break;
    default: spec.kind = WeatherKind::snow; break;
    }
    spec.strength = rng.next_double();
    spec.seed = seed;
    return spec;
}

} // namespace uaseg
