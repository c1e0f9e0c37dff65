#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uaseg/grid.hpp"

namespace uaseg {

struct PaletteEntry {
    Rgb8 color;
    std::string name;
};

// Ordered color -> class mapping; the entry order fixes the mask index.
// Colors must be unique.
class Palette {
public:
    Palette() = default;
    explicit Palette(std::vector<PaletteEntry> entries);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const PaletteEntry& entry(std::size_t i) const { return entries_[i]; }
    const std::vector<PaletteEntry>& entries() const { return entries_; }

    std::optional<std::size_t> index_of(Rgb8 color) const;
    std::optional<Rgb8> color_of(const std::string& name) const;

private:
    std::vector<PaletteEntry> entries_;
};

// CSV with header `r,g,b,name`, 8-bit components.
Palette load_palette_csv(const std::filesystem::path& path);
void save_palette_csv(const std::filesystem::path& path, const Palette& palette);

} // namespace uaseg
