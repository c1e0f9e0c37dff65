#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uaseg/error.hpp"

namespace uaseg {

// Dense row-major H x W grid of T. Row index i runs top to bottom,
// column index j left to right.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int height, int width, T fill = T{})
        : height_(height), width_(width),
          cells_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill) {
        if (height < 1 || width < 1)
            throw InvalidInputError("Grid: dimensions must be >= 1, got " +
                                    std::to_string(height) + "x" + std::to_string(width));
    }

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    T& at(int i, int j) { return cells_[static_cast<std::size_t>(i) * width_ + j]; }
    const T& at(int i, int j) const { return cells_[static_cast<std::size_t>(i) * width_ + j]; }

    std::vector<T>& cells() { return cells_; }
    const std::vector<T>& cells() const { return cells_; }

    bool same_shape(const Grid& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<T> cells_;
};

// Per-pixel {0,1} class membership mask.
using BinaryMask = Grid<std::uint8_t>;

// Per-pixel Monte-Carlo standard deviation, always >= 0.
using UncertaintyMap = Grid<double>;

// One 8-bit RGB triplet, the unit of a color-coded annotation.
struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend auto operator<=>(const Rgb8&, const Rgb8&) = default;
};

// H x W x 3 color raster with channel values in [0,1].
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int height, int width, double fill = 0.0)
        : height_(height), width_(width),
          channels_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * 3, fill) {
        if (height < 1 || width < 1)
            throw InvalidInputError("RasterImage: dimensions must be >= 1");
    }

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return channels_.size(); }

    double& at(int i, int j, int c) {
        return channels_[(static_cast<std::size_t>(i) * width_ + j) * 3 + c];
    }
    double at(int i, int j, int c) const {
        return channels_[(static_cast<std::size_t>(i) * width_ + j) * 3 + c];
    }

    std::vector<double>& channels() { return channels_; }
    const std::vector<double>& channels() const { return channels_; }

    bool same_shape(const RasterImage& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<double> channels_;
};

// H x W color-coded annotation raster, one 8-bit RGB triplet per pixel.
class LabelRaster {
public:
    LabelRaster() = default;
    LabelRaster(int height, int width, Rgb8 fill = Rgb8{}) : pixels_(height, width, fill) {}

    int height() const { return pixels_.height(); }
    int width() const { return pixels_.width(); }

    Rgb8& at(int i, int j) { return pixels_.at(i, j); }
    const Rgb8& at(int i, int j) const { return pixels_.at(i, j); }

    Grid<Rgb8>& pixels() { return pixels_; }
    const Grid<Rgb8>& pixels() const { return pixels_; }

    bool same_shape(const LabelRaster& other) const { return pixels_.same_shape(other.pixels_); }

    // Distinct colors present in the raster, sorted by (r,g,b).
    std::vector<Rgb8> palette_colors() const;

    friend bool operator==(const LabelRaster&, const LabelRaster&) = default;

private:
    Grid<Rgb8> pixels_;
};

// Dense n x H x W stack of doubles, row-major with the mask index
// slowest: element (k,i,j) sits at ((k*H)+i)*W + j.
class Stack {
public:
    Stack() = default;
    Stack(int count, int height, int width, double fill = 0.0)
        : count_(count), height_(height), width_(width),
          values_(static_cast<std::size_t>(count) * height * width, fill) {
        if (count < 1 || height < 1 || width < 1)
            throw InvalidInputError("Stack: dimensions must be >= 1");
    }

    int count() const { return count_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return values_.size(); }

    double& at(int k, int i, int j) {
        return values_[(static_cast<std::size_t>(k) * height_ + i) * width_ + j];
    }
    double at(int k, int i, int j) const {
        return values_[(static_cast<std::size_t>(k) * height_ + i) * width_ + j];
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool same_shape(const Stack& other) const {
        return count_ == other.count_ && height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const Stack&, const Stack&) = default;

private:
    int count_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> values_;
};

// Pre-sigmoid per-mask scores. Kept as a distinct type so logits cannot be
// fed where probabilities are expected; sigmoid_reduce is the only bridge.
struct LogitStack : Stack {
    LogitStack() = default;
    LogitStack(int count, int height, int width, double fill = 0.0)
        : Stack(count, height, width, fill) {}
    explicit LogitStack(Stack s) : Stack(std::move(s)) {}
};

// Post-sigmoid per-mask probabilities, elementwise in (0,1) for finite logits.
struct ProbabilityStack : Stack {
    ProbabilityStack() = default;
    ProbabilityStack(int count, int height, int width, double fill = 0.0)
        : Stack(count, height, width, fill) {}
    explicit ProbabilityStack(Stack s) : Stack(std::move(s)) {}
};

// Per-pixel (dx, dy) offsets in pixel units; dx moves along columns,
// dy along rows.
struct DisplacementField {
    Grid<double> dx;
    Grid<double> dy;

    DisplacementField() = default;
    DisplacementField(int height, int width) : dx(height, width, 0.0), dy(height, width, 0.0) {}

    int height() const { return dx.height(); }
    int width() const { return dx.width(); }
};

} // namespace uaseg
