#pragma once

#include <string>
#include <vector>

#include "uaseg/grid.hpp"
#include "uaseg/palette.hpp"

namespace uaseg {

// One connected component of a class mask, cropped to its padded bounding
// box. Row/col bounds use exclusive ends. image_crop is empty unless a
// source image was supplied alongside the labels.
struct InstancePatch {
    RasterImage image_crop;
    BinaryMask mask_crop;
    std::string source_id;
    int row0 = 0;
    int col0 = 0;
    int row1 = 0;
    int col1 = 0;

    int rows() const { return row1 - row0; }
    int cols() const { return col1 - col0; }
};

// Mask i is 1 exactly where the raster pixel equals palette color i.
// Masks for absent colors are all-zero and retained so indices stay stable.
std::vector<BinaryMask> split_by_color(const LabelRaster& labels, const Palette& palette);

// 4-connected components of {labels == class_color} with area >= min_area,
// each cropped to its bounding box expanded by pad (clamped to bounds).
// Components are emitted in row-major order of their first pixel.
std::vector<InstancePatch> extract_instances(const LabelRaster& labels, Rgb8 class_color,
                                             int min_area, int pad,
                                             const RasterImage* image = nullptr,
                                             const std::string& source_id = {});

constexpr int kDefaultMinArea = 64;
constexpr int kDefaultPad = 8;

} // namespace uaseg
