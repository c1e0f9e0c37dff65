#include "uaseg/mask_ops.hpp"

#include <algorithm>
#include <unordered_map>

namespace uaseg {
namespace {

std::uint32_t pack(Rgb8 c) {
    return (std::uint32_t(c.r) << 16) | (std::uint32_t(c.g) << 8) | std::uint32_t(c.b);
}

} // namespace

std::vector<BinaryMask> split_by_color(const LabelRaster& labels, const Palette& palette) {
    if (palette.empty()) throw InvalidInputError("split_by_color: empty palette");

    std::unordered_map<std::uint32_t, std::size_t> index;
    index.reserve(palette.size());
    for (std::size_t k = 0; k < palette.size(); ++k) index.emplace(pack(palette.entry(k).color), k);

    std::vector<BinaryMask> masks(palette.size(),
                                  BinaryMask(labels.height(), labels.width(), 0));
    for (int i = 0; i < labels.height(); ++i)
        for (int j = 0; j < labels.width(); ++j) {
            const auto it = index.find(pack(labels.at(i, j)));
            if (it != index.end()) masks[it->second].at(i, j) = 1;
        }
    return masks;
}

std::vector<InstancePatch> extract_instances(const LabelRaster& labels, Rgb8 class_color,
                                             int min_area, int pad, const RasterImage* image,
                                             const std::string& source_id) {
    if (min_area < 1) throw InvalidParameterError("extract_instances: min_area must be >= 1");
    if (pad < 0) throw InvalidParameterError("extract_instances: pad must be >= 0");
    if (image && (image->height() != labels.height() || image->width() != labels.width()))
        throw InvalidInputError("extract_instances: image and label dimensions differ");

    const int h = labels.height(), w = labels.width();
    Grid<std::int32_t> component(h, w, -1);
    std::vector<InstancePatch> patches;
    std::vector<std::pair<int, int>> stack;

    int next_component = 0;
    for (int si = 0; si < h; ++si)
        for (int sj = 0; sj < w; ++sj) {
            if (component.at(si, sj) >= 0 || labels.at(si, sj) != class_color) continue;

            const int id = next_component++;
            int area = 0;
            int r0 = si, r1 = si, c0 = sj, c1 = sj;
            stack.assign(1, {si, sj});
            component.at(si, sj) = id;
            while (!stack.empty()) {
                const auto [i, j] = stack.back();
                stack.pop_back();
                ++area;
                r0 = std::min(r0, i);
                r1 = std::max(r1, i);
                c0 = std::min(c0, j);
                c1 = std::max(c1, j);
                const int ni[4] = {i - 1, i + 1, i, i};
                const int nj[4] = {j, j, j - 1, j + 1};
                for (int k = 0; k < 4; ++k) {
                    if (ni[k] < 0 || ni[k] >= h || nj[k] < 0 || nj[k] >= w) continue;
                    if (component.at(ni[k], nj[k]) >= 0) continue;
                    if (labels.at(ni[k], nj[k]) != class_color) continue;
                    component.at(ni[k], nj[k]) = id;
                    stack.push_back({ni[k], nj[k]});
                }
            }
            if (area < min_area) continue;

            InstancePatch patch;
            patch.source_id = source_id;
            patch.row0 = std::max(0, r0 - pad);
            patch.col0 = std::max(0, c0 - pad);
            patch.row1 = std::min(h, r1 + 1 + pad);
            patch.col1 = std::min(w, c1 + 1 + pad);

            patch.mask_crop = BinaryMask(patch.rows(), patch.cols(), 0);
            for (int i = patch.row0; i < patch.row1; ++i)
                for (int j = patch.col0; j < patch.col1; ++j)
                    if (component.at(i, j) == id)
                        patch.mask_crop.at(i - patch.row0, j - patch.col0) = 1;

            if (image) {
                patch.image_crop = RasterImage(patch.rows(), patch.cols());
                for (int i = patch.row0; i < patch.row1; ++i)
                    for (int j = patch.col0; j < patch.col1; ++j)
                        for (int c = 0; c < 3; ++c)
                            patch.image_crop.at(i - patch.row0, j - patch.col0, c) =
                                image->at(i, j, c);
            }
            patches.push_back(std::move(patch));
        }
    return patches;
}

} // namespace uaseg
