#include "uaseg/grid.hpp"

#include <algorithm>

namespace uaseg {

std::vector<Rgb8> LabelRaster::palette_colors() const {
    std::vector<Rgb8> colors(pixels_.cells());
    std::sort(colors.begin(), colors.end());
    colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
    return colors;
}

} // namespace uaseg
