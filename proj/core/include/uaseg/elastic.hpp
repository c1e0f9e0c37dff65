#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "uaseg/grid.hpp"
#include "uaseg/weather.hpp"

namespace uaseg {

// Elastic deformation request. alpha is the peak displacement in pixels
// (per axis, after normalization), sigma the Gaussian smoothing std.
struct DeformSpec {
    double alpha = 0.0;
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

// Weather-style deformation presets: fog (20,15), rain (25,4), snow (30,7).
DeformSpec deform_preset(WeatherKind kind);

// field = alpha * normalize(gaussian_blur(uniform(-1,1) noise, sigma)) per
// axis, where normalize rescales each axis to unit maximum absolute value.
// Deterministic given the seed; alpha = 0 gives the all-zero field.
DisplacementField make_field(int height, int width, const DeformSpec& spec);

// Separable Gaussian blur with kernel radius ceil(3*sigma) and edge-clamped
// boundary handling. Exposed for tests; sigma must be > 0.
Grid<double> gaussian_blur(const Grid<double>& src, double sigma);

// Inverse-mapped nearest-neighbor warp with border clamping:
// out(i,j) = labels(round(i+dy), round(j+dx)). The output palette is always
// a subset of the input palette.
LabelRaster warp_labels(const LabelRaster& labels, const DisplacementField& field);

// Same warp for color rasters, bilinear-sampled with border clamping.
RasterImage warp_image(const RasterImage& img, const DisplacementField& field);

// The four-annotation bundle: [original, fog-deformed, rain-deformed,
// snow-deformed], each preset seeded from (seed, preset name).
std::vector<LabelRaster> synthesize_annotations(const LabelRaster& labels, std::uint64_t seed);

} // namespace uaseg
