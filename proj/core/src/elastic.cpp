#include "uaseg/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uaseg/rng.hpp"

namespace uaseg {
namespace {

int clamp_index(long long v, int hi) {
    if (v < 0) return 0;
    if (v > hi) return hi;
    return static_cast<int>(v);
}

Grid<double> noise_grid(int height, int width, SplitMix64& rng) {
    Grid<double> g(height, width);
    for (auto& v : g.cells()) v = rng.next_double(-1.0, 1.0);
    return g;
}

// Scales one blurred-noise axis to peak displacement alpha.
Grid<double> normalize_axis(Grid<double> g, double alpha) {
    double max_abs = 0.0;
    for (double v : g.cells()) max_abs = std::max(max_abs, std::fabs(v));
    const double scale = max_abs > 0.0 ? alpha / max_abs : 0.0;
    for (auto& v : g.cells()) v *= scale;
    return g;
}

} // namespace

DeformSpec deform_preset(WeatherKind kind) {
    switch (kind) {
    case WeatherKind::fog: return DeformSpec{20.0, 15.0, 0};
    case WeatherKind::rain: return DeformSpec{25.0, 4.0, 0};
    case WeatherKind::snow: return DeformSpec{30.0, 7.0, 0};
    }
    throw InvalidParameterError("unknown deformation preset");
}

Grid<double> gaussian_blur(const Grid<double>& src, double sigma) {
    if (!(sigma > 0.0))
        throw InvalidParameterError("gaussian_blur: sigma must be > 0, got " +
                                    std::to_string(sigma));
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        kernel[t + radius] = std::exp(-(static_cast<double>(t) * t) / (2.0 * sigma * sigma));
        sum += kernel[t + radius];
    }
    for (auto& k : kernel) k /= sum;

    const int h = src.height(), w = src.width();
    Grid<double> tmp(h, w), out(h, w);

    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kernel[t + radius] * src.at(i, clamp_index(j + t, w - 1));
            tmp.at(i, j) = acc;
        }
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += kernel[t + radius] * tmp.at(clamp_index(i + t, h - 1), j);
            out.at(i, j) = acc;
        }
    return out;
}

DisplacementField make_field(int height, int width, const DeformSpec& spec) {
    if (spec.alpha < 0.0)
        throw InvalidParameterError("make_field: alpha must be >= 0");
    if (!(spec.sigma > 0.0))
        throw InvalidParameterError("make_field: sigma must be > 0");

    SplitMix64 rng(derive_seed(SeedSpec{spec.seed}, "elastic.noise"));
    Grid<double> nx = noise_grid(height, width, rng);
    Grid<double> ny = noise_grid(height, width, rng);

    DisplacementField field;
    field.dx = normalize_axis(gaussian_blur(nx, spec.sigma), spec.alpha);
    field.dy = normalize_axis(gaussian_blur(ny, spec.sigma), spec.alpha);
    return field;
}

LabelRaster warp_labels(const LabelRaster& labels, const DisplacementField& field) {
    if (labels.height() != field.height() || labels.width() != field.width())
        throw InvalidInputError("warp_labels: raster and field dimensions differ");

    const int h = labels.height(), w = labels.width();
    LabelRaster out(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const int si = clamp_index(std::llround(i + field.dy.at(i, j)), h - 1);
            const int sj = clamp_index(std::llround(j + field.dx.at(i, j)), w - 1);
            out.at(i, j) = labels.at(si, sj);
        }
    return out;
}

RasterImage warp_image(const RasterImage& img, const DisplacementField& field) {
    if (img.height() != field.height() || img.width() != field.width())
        throw InvalidInputError("warp_image: image and field dimensions differ");

    const int h = img.height(), w = img.width();
    const auto clampd = [](double v, double hi) { return v < 0.0 ? 0.0 : (v > hi ? hi : v); };

    RasterImage out(h, w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double si = clampd(i + field.dy.at(i, j), h - 1.0);
            const double sj = clampd(j + field.dx.at(i, j), w - 1.0);
            const int i0 = static_cast<int>(si);
            const int j0 = static_cast<int>(sj);
            const int i1 = std::min(i0 + 1, h - 1);
            const int j1 = std::min(j0 + 1, w - 1);
            const double fi = si - i0;
            const double fj = sj - j0;
            for (int c = 0; c < 3; ++c) {
                const double top = img.at(i0, j0, c) + fj * (img.at(i0, j1, c) - img.at(i0, j0, c));
                const double bot = img.at(i1, j0, c) + fj * (img.at(i1, j1, c) - img.at(i1, j0, c));
                out.at(i, j, c) = top + fi * (bot - top);
            }
        }
    return out;
}

std::vector<LabelRaster> synthesize_annotations(const LabelRaster& labels, std::uint64_t seed) {
    std::vector<LabelRaster> bundle;
    bundle.reserve(4);
    bundle.push_back(labels);
    for (WeatherKind kind : {WeatherKind::fog, WeatherKind::rain, WeatherKind::snow}) {
        DeformSpec spec = deform_preset(kind);
        spec.seed = derive_seed(SeedSpec{seed}, std::string("deform.") + std::string(to_string(kind)));
        const DisplacementField field = make_field(labels.height(), labels.width(), spec);
        bundle.push_back(warp_labels(labels, field));
    }
    return bundle;
}

} // namespace uaseg
