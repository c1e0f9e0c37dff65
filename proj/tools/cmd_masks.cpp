#include <iostream>
#include <memory>

#include <json.hpp>

#include "cli_common.hpp"
#include "uaseg/mask_ops.hpp"
#include "uaseg/png_io.hpp"

namespace fs = std::filesystem;
using namespace uaseg;
using uaseg::cli::ensure_dir;
using uaseg::cli::list_png_files;
using uaseg::cli::parallel_for;
using uaseg::cli::sanitize_name;
using uaseg::cli::write_file_if_changed;
using uaseg::cli::write_png_if_changed;

void register_cmd_palette_split(CLI::App& app) {
    struct Options {
        std::string labels, palette, output;
        int jobs = 1;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd = app.add_subcommand(
        "palette-split", "Decompose color-coded labels into per-class binary masks");
    cmd->add_option("--labels", opts->labels, "Label PNG file or directory")->required();
    cmd->add_option("--palette", opts->palette, "Palette CSV (r,g,b,name)")->required();
    cmd->add_option("--output", opts->output, "Output directory")->required();
    cmd->add_option("--jobs", opts->jobs, "Parallel workers")->check(CLI::PositiveNumber);

    cmd->callback([opts] {
        const Palette palette = load_palette_csv(opts->palette);
        std::vector<fs::path> files;
        if (fs::is_directory(opts->labels))
            files = list_png_files(opts->labels);
        else
            files.push_back(opts->labels);
        if (files.empty()) throw IoError("no PNG files in " + opts->labels);
        uaseg::cli::ensure_output_distinct(opts->labels, opts->output);
        ensure_dir(opts->output);

        parallel_for(files.size(), opts->jobs, [&](std::size_t idx) {
            const fs::path& file = files[idx];
            const auto masks = split_by_color(load_label_png(file), palette);
            const fs::path item_dir = fs::path(opts->output) / file.stem();
            ensure_dir(item_dir);
            for (std::size_t k = 0; k < masks.size(); ++k) {
                const fs::path out =
                    item_dir / (sanitize_name(palette.entry(k).name) + ".png");
                write_png_if_changed(out,
                                     [&](const fs::path& p) { save_mask_png(p, masks[k]); });
            }
        });
        std::cerr << "palette-split: processed " << files.size() << " file(s)\n";
    });
}

void register_cmd_crop_instances(CLI::App& app) {
    struct Options {
        std::string labels, images, palette, output;
        std::string class_name;
        int min_area = kDefaultMinArea;
        int pad = kDefaultPad;
        int jobs = 1;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd = app.add_subcommand(
        "crop-instances", "Crop connected components of one class into patches");
    cmd->add_option("--labels", opts->labels, "Directory of label PNGs")->required();
    cmd->add_option("--images", opts->images, "Directory of matching images (optional)");
    cmd->add_option("--palette", opts->palette, "Palette CSV")->required();
    cmd->add_option("--class", opts->class_name, "Class name from the palette")->required();
    cmd->add_option("--min-area", opts->min_area, "Minimum component area (default 64)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pad", opts->pad, "Bounding-box padding (default 8)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--output", opts->output, "Output directory")->required();
    cmd->add_option("--jobs", opts->jobs, "Parallel workers")->check(CLI::PositiveNumber);

    cmd->callback([opts] {
        const Palette palette = load_palette_csv(opts->palette);
        const auto color = palette.color_of(opts->class_name);
        if (!color)
            throw InvalidParameterError("class '" + opts->class_name +
                                        "' not found in palette");

        const auto files = list_png_files(opts->labels);
        if (files.empty()) throw IoError("no PNG files in " + opts->labels);
        uaseg::cli::ensure_output_distinct(opts->labels, opts->output);
        if (!opts->images.empty())
            uaseg::cli::ensure_output_distinct(opts->images, opts->output);
        ensure_dir(opts->output);

        std::vector<std::vector<InstancePatch>> per_file(files.size());
        parallel_for(files.size(), opts->jobs, [&](std::size_t idx) {
            const fs::path& file = files[idx];
            const LabelRaster labels = load_label_png(file);
            RasterImage image;
            const RasterImage* image_ptr = nullptr;
            if (!opts->images.empty()) {
                const fs::path image_path = fs::path(opts->images) / file.filename();
                if (fs::exists(image_path)) {
                    image = load_image_png(image_path);
                    image_ptr = &image;
                }
            }
            per_file[idx] = extract_instances(labels, *color, opts->min_area, opts->pad,
                                              image_ptr, file.stem().string());

            for (std::size_t k = 0; k < per_file[idx].size(); ++k) {
                const auto& patch = per_file[idx][k];
                const std::string base = file.stem().string() + "_" + std::to_string(k);
                write_png_if_changed(
                    fs::path(opts->output) / (base + "_mask.png"),
                    [&](const fs::path& p) { save_mask_png(p, patch.mask_crop); });
                if (image_ptr)
                    write_png_if_changed(
                        fs::path(opts->output) / (base + "_image.png"),
                        [&](const fs::path& p) { save_image_png(p, patch.image_crop); });
            }
        });

        nlohmann::json manifest = nlohmann::json::array();
        std::size_t total = 0;
        for (std::size_t idx = 0; idx < files.size(); ++idx)
            for (std::size_t k = 0; k < per_file[idx].size(); ++k) {
                const auto& patch = per_file[idx][k];
                std::int64_t area = 0;
                for (auto v : patch.mask_crop.cells()) area += v;
                manifest.push_back({{"source", patch.source_id},
                                    {"index", k},
                                    {"row0", patch.row0},
                                    {"col0", patch.col0},
                                    {"row1", patch.row1},
                                    {"col1", patch.col1},
                                    {"area", area}});
                ++total;
            }
        write_file_if_changed(fs::path(opts->output) / "instances.json",
                              manifest.dump(2) + "\n");
        std::cerr << "crop-instances: " << total << " patch(es) from " << files.size()
                  << " file(s)\n";
    });
}
