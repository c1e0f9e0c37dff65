#pragma once

#include <filesystem>

#include "uaseg/grid.hpp"

namespace uaseg {

// 8-bit PNG persistence. RasterImage values are stored as round(v*255) and
// loaded back as byte/255; BinaryMask uses grayscale {0,255}; LabelRaster
// keeps its discrete 8-bit triplets untouched. Grayscale, palette, and
// alpha inputs are normalized to plain RGB on load.

RasterImage load_image_png(const std::filesystem::path& path);
void save_image_png(const std::filesystem::path& path, const RasterImage& image);

LabelRaster load_label_png(const std::filesystem::path& path);
void save_label_png(const std::filesystem::path& path, const LabelRaster& labels);

// Grayscale loads threshold at 128 to recover the {0,1} mask.
BinaryMask load_mask_png(const std::filesystem::path& path);
void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

// Grayscale real-valued grids in [0,1] (probability samples, heatmaps);
// stored as round(v*255).
Grid<double> load_gray_png(const std::filesystem::path& path);
void save_gray_png(const std::filesystem::path& path, const Grid<double>& gray);

} // namespace uaseg
