#include "uaseg/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

namespace uaseg {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    // Recovered via the setjmp buffer installed by libpng.
    (void)msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

// Decodes any 8/16-bit PNG into packed 8-bit RGB rows.
struct DecodedRgb {
    int height = 0;
    int width = 0;
    std::vector<unsigned char> rgb; // height*width*3
};

DecodedRgb decode_rgb8(const std::filesystem::path& path) {
    FilePtr file = open_file(path, "rb");

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("libpng: read struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng: info struct allocation failed");
    }

    DecodedRgb out;
    std::vector<png_bytep> row_ptrs;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG " + path.string());
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_packing(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY &&
        png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    out.height = static_cast<int>(png_get_image_height(png, info));
    out.width = static_cast<int>(png_get_image_width(png, info));
    if (out.height < 1 || out.width < 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("empty PNG " + path.string());
    }

    out.rgb.resize(static_cast<std::size_t>(out.height) * out.width * 3);
    row_ptrs.resize(out.height);
    for (int i = 0; i < out.height; ++i)
        row_ptrs[i] = out.rgb.data() + static_cast<std::size_t>(i) * out.width * 3;

    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void encode_png(const std::filesystem::path& path, int height, int width, int color_type,
                const unsigned char* bytes, int bytes_per_pixel) {
    FilePtr file = open_file(path, "wb");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    if (!png) throw IoError("libpng: write struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: info struct allocation failed");
    }

    std::vector<png_bytep> row_ptrs(height);
    for (int i = 0; i < height; ++i)
        row_ptrs[i] = const_cast<png_bytep>(bytes + static_cast<std::size_t>(i) * width *
                                                        bytes_per_pixel);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG " + path.string());
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

unsigned char quantize01(double v) {
    if (v <= 0.0) return 0;
    if (v >= 1.0) return 255;
    return static_cast<unsigned char>(std::lround(v * 255.0));
}

} // namespace

RasterImage load_image_png(const std::filesystem::path& path) {
    DecodedRgb d = decode_rgb8(path);
    RasterImage img(d.height, d.width);
    auto& ch = img.channels();
    for (std::size_t idx = 0; idx < d.rgb.size(); ++idx) ch[idx] = d.rgb[idx] / 255.0;
    return img;
}

void save_image_png(const std::filesystem::path& path, const RasterImage& image) {
    const auto& ch = image.channels();
    std::vector<unsigned char> bytes(ch.size());
    for (std::size_t idx = 0; idx < ch.size(); ++idx) bytes[idx] = quantize01(ch[idx]);
    encode_png(path, image.height(), image.width(), PNG_COLOR_TYPE_RGB, bytes.data(), 3);
}

LabelRaster load_label_png(const std::filesystem::path& path) {
    DecodedRgb d = decode_rgb8(path);
    LabelRaster labels(d.height, d.width);
    const unsigned char* p = d.rgb.data();
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j) {
            labels.at(i, j) = Rgb8{p[0], p[1], p[2]};
            p += 3;
        }
    return labels;
}

void save_label_png(const std::filesystem::path& path, const LabelRaster& labels) {
    std::vector<unsigned char> bytes(static_cast<std::size_t>(labels.height()) *
                                     labels.width() * 3);
    unsigned char* p = bytes.data();
    for (int i = 0; i < labels.height(); ++i)
        for (int j = 0; j < labels.width(); ++j) {
            const Rgb8 c = labels.at(i, j);
            p[0] = c.r;
            p[1] = c.g;
            p[2] = c.b;
            p += 3;
        }
    encode_png(path, labels.height(), labels.width(), PNG_COLOR_TYPE_RGB, bytes.data(), 3);
}

BinaryMask load_mask_png(const std::filesystem::path& path) {
    DecodedRgb d = decode_rgb8(path);
    BinaryMask mask(d.height, d.width);
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j) {
            const std::size_t idx = (static_cast<std::size_t>(i) * d.width + j) * 3;
            mask.at(i, j) = d.rgb[idx] >= 128 ? 1 : 0;
        }
    return mask;
}

void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    std::vector<unsigned char> bytes(mask.size());
    const auto& cells = mask.cells();
    for (std::size_t idx = 0; idx < cells.size(); ++idx) bytes[idx] = cells[idx] ? 255 : 0;
    encode_png(path, mask.height(), mask.width(), PNG_COLOR_TYPE_GRAY, bytes.data(), 1);
}

Grid<double> load_gray_png(const std::filesystem::path& path) {
    DecodedRgb d = decode_rgb8(path);
    Grid<double> gray(d.height, d.width);
    for (int i = 0; i < d.height; ++i)
        for (int j = 0; j < d.width; ++j) {
            const std::size_t idx = (static_cast<std::size_t>(i) * d.width + j) * 3;
            gray.at(i, j) = d.rgb[idx] / 255.0;
        }
    return gray;
}

void save_gray_png(const std::filesystem::path& path, const Grid<double>& gray) {
    std::vector<unsigned char> bytes(gray.size());
    const auto& cells = gray.cells();
    for (std::size_t idx = 0; idx < cells.size(); ++idx) bytes[idx] = quantize01(cells[idx]);
    encode_png(path, gray.height(), gray.width(), PNG_COLOR_TYPE_GRAY, bytes.data(), 1);
}

} // namespace uaseg
