#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "cli_common.hpp"
#include "uaseg/mask_ops.hpp"
#include "uaseg/metrics.hpp"
#include "uaseg/png_io.hpp"
#include "uaseg/rng.hpp"

namespace fs = std::filesystem;
using namespace uaseg;
using namespace uaseg::cli;

namespace {

struct PipelineOptions {
    std::string input, labels, output, palette;
    std::string weather_kind = "random";
    std::string strength = "random";
    std::string deform_presets = "all";
    std::string class_name; // empty: use "Car" when present, else skip cropping
    int min_area = kDefaultMinArea;
    int pad = kDefaultPad;
    double epsilon = 1e-6;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string config;
};

// Config file first, then flags the user actually passed win.
void merge_config_file(PipelineOptions& opts, const CLI::App& cmd) {
    std::ifstream in(opts.config);
    if (!in) throw IoError("cannot open pipeline config " + opts.config);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad JSON in " + opts.config + ": " + e.what());
    }

    const auto keep_flag = [&](const char* flag) { return cmd.count(flag) > 0; };
    try {
        if (j.contains("input_dir") && !keep_flag("--input")) opts.input = j["input_dir"];
        if (j.contains("labels_dir") && !keep_flag("--labels")) opts.labels = j["labels_dir"];
        if (j.contains("output_dir") && !keep_flag("--output")) opts.output = j["output_dir"];
        if (j.contains("palette") && !keep_flag("--palette")) opts.palette = j["palette"];
        if (j.contains("weather") && !keep_flag("--weather"))
            opts.weather_kind = j["weather"].is_string() ? j["weather"].get<std::string>()
                                                         : j["weather"].value("kind", "random");
        if (j.contains("weather") && j["weather"].is_object() && !keep_flag("--strength") &&
            j["weather"].contains("strength"))
            opts.strength = j["weather"]["strength"].is_number()
                                ? std::to_string(j["weather"]["strength"].get<double>())
                                : j["weather"]["strength"].get<std::string>();
        if (j.contains("strength") && !keep_flag("--strength"))
            opts.strength = j["strength"].is_number()
                                ? std::to_string(j["strength"].get<double>())
                                : j["strength"].get<std::string>();
        if (j.contains("deform_presets") && !keep_flag("--deform")) {
            std::string joined;
            for (const auto& p : j["deform_presets"]) {
                if (!joined.empty()) joined += ",";
                joined += p.get<std::string>();
            }
            opts.deform_presets = joined;
        }
        if (j.contains("class") && !keep_flag("--class"))
            opts.class_name = j["class"].get<std::string>();
        if (j.contains("min_area") && !keep_flag("--min-area")) opts.min_area = j["min_area"];
        if (j.contains("pad") && !keep_flag("--pad")) opts.pad = j["pad"];
        if (j.contains("seed") && !keep_flag("--seed"))
            opts.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("loss") && j["loss"].contains("epsilon") && !keep_flag("--epsilon"))
            opts.epsilon = j["loss"]["epsilon"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad pipeline config " + opts.config + ": " + e.what());
    }
}

std::vector<std::string> parse_presets(const std::string& csv) {
    if (csv == "all") return {"fog", "rain", "snow"};
    std::vector<std::string> presets;
    std::string cur;
    for (char ch : csv + ",") {
        if (ch == ',') {
            if (!cur.empty()) {
                if (cur != "fog" && cur != "rain" && cur != "snow")
                    throw InvalidParameterError("pipeline: unknown deform preset '" + cur + "'");
                presets.push_back(cur);
                cur.clear();
            }
        } else {
            cur += ch;
        }
    }
    if (presets.empty()) throw InvalidParameterError("pipeline: no deform presets selected");
    return presets;
}

void run_pipeline(const PipelineOptions& opts, std::uint64_t seed) {
    // Validate every path up front; no stage should start on a broken setup.
    if (!fs::is_directory(opts.input))
        throw IoError("pipeline: --input is not a directory: " + opts.input);
    if (!fs::is_directory(opts.labels))
        throw IoError("pipeline: --labels is not a directory: " + opts.labels);
    if (!fs::is_regular_file(opts.palette))
        throw IoError("pipeline: --palette is not a file: " + opts.palette);
    const Palette palette = load_palette_csv(opts.palette);
    const auto image_files = list_png_files(opts.input);
    const auto label_files = list_png_files(opts.labels);
    if (image_files.empty()) throw IoError("pipeline: no images in " + opts.input);
    if (label_files.empty()) throw IoError("pipeline: no labels in " + opts.labels);
    ensure_output_distinct(opts.input, opts.output);
    ensure_output_distinct(opts.labels, opts.output);
    ensure_dir(opts.output);

    const fs::path out(opts.output);
    const auto presets = parse_presets(opts.deform_presets);

    // Stage 1: weather corruption of the input images.
    stages::WeatherStageOptions weather;
    weather.input_dir = opts.input;
    weather.output_dir = out / "weather";
    weather.kind = opts.weather_kind;
    weather.strength = opts.strength;
    weather.seed = seed;
    weather.jobs = opts.jobs;
    stages::run_weather(weather);

    // Stage 2: elastic annotation variants.
    stages::DeformStageOptions deform;
    deform.labels_dir = opts.labels;
    deform.output_dir = out / "deform";
    deform.presets = presets;
    deform.seed = seed;
    deform.jobs = opts.jobs;
    stages::run_deform(deform);

    // Stage 3: per-class binary masks of the ground truth.
    ensure_dir(out / "masks");
    parallel_for(label_files.size(), opts.jobs, [&](std::size_t idx) {
        const fs::path& file = label_files[idx];
        const auto masks = split_by_color(load_label_png(file), palette);
        const fs::path item_dir = out / "masks" / file.stem();
        ensure_dir(item_dir);
        for (std::size_t k = 0; k < masks.size(); ++k)
            write_png_if_changed(item_dir / (sanitize_name(palette.entry(k).name) + ".png"),
                                 [&](const fs::path& p) { save_mask_png(p, masks[k]); });
    });
    std::cerr << "pipeline: split " << label_files.size() << " label file(s)\n";

    // Stage 4: instance crops of the focus class, paired with the
    // weather-corrupted images.
    std::string class_name = opts.class_name;
    if (class_name.empty() && palette.color_of("Car")) class_name = "Car";
    if (!class_name.empty()) {
        const auto color = palette.color_of(class_name);
        if (!color)
            throw InvalidParameterError("pipeline: class '" + class_name +
                                        "' not found in palette");
        ensure_dir(out / "instances");
        std::vector<std::vector<InstancePatch>> per_file(label_files.size());
        parallel_for(label_files.size(), opts.jobs, [&](std::size_t idx) {
            const fs::path& file = label_files[idx];
            const LabelRaster labels = load_label_png(file);
            RasterImage image;
            const RasterImage* image_ptr = nullptr;
            const fs::path corrupted = out / "weather" / file.filename();
            if (fs::exists(corrupted)) {
                image = load_image_png(corrupted);
                if (image.height() == labels.height() && image.width() == labels.width())
                    image_ptr = &image;
            }
            per_file[idx] = extract_instances(labels, *color, opts.min_area, opts.pad,
                                              image_ptr, file.stem().string());
            for (std::size_t k = 0; k < per_file[idx].size(); ++k) {
                const auto& patch = per_file[idx][k];
                const std::string base = file.stem().string() + "_" + std::to_string(k);
                write_png_if_changed(out / "instances" / (base + "_mask.png"),
                                     [&](const fs::path& p) {
                                         save_mask_png(p, patch.mask_crop);
                                     });
                if (image_ptr)
                    write_png_if_changed(out / "instances" / (base + "_image.png"),
                                         [&](const fs::path& p) {
                                             save_image_png(p, patch.image_crop);
                                         });
            }
        });
        nlohmann::json manifest = nlohmann::json::array();
        for (std::size_t idx = 0; idx < label_files.size(); ++idx)
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
            }
        write_file_if_changed(out / "instances" / "instances.json", manifest.dump(2) + "\n");
        std::cerr << "pipeline: cropped '" << class_name << "' instances\n";
    } else {
        std::cerr << "pipeline: no focus class in palette, skipping instance crops\n";
    }

    // Stage 5: score each deformed variant against its source annotation.
    // item_id is <stem>_<preset> so one report pools all variants.
    std::vector<PairScore> scores(label_files.size() * presets.size() * palette.size());
    parallel_for(label_files.size(), opts.jobs, [&](std::size_t idx) {
        const fs::path& file = label_files[idx];
        const LabelRaster gt = load_label_png(file);
        const auto gt_masks = split_by_color(gt, palette);
        for (std::size_t pi = 0; pi < presets.size(); ++pi) {
            const fs::path variant =
                out / "deform" / (file.stem().string() + "_" + presets[pi] + ".png");
            const LabelRaster pred = load_label_png(variant);
            const auto pred_masks = split_by_color(pred, palette);
            for (std::size_t k = 0; k < palette.size(); ++k) {
                const BinaryScore s =
                    binary_iou_dice(pred_masks[k], gt_masks[k], opts.epsilon);
                scores[(idx * presets.size() + pi) * palette.size() + k] =
                    PairScore{file.stem().string() + "_" + presets[pi],
                              palette.entry(k).name, s.iou, s.dice, s.both_empty};
            }
        }
    });
    ensure_dir(out / "eval");
    write_file_if_changed(out / "eval" / "pairs.csv", pair_scores_csv_text(scores));
    std::vector<PairScore> informative;
    for (const auto& s : scores)
        if (!s.both_empty) informative.push_back(s);
    if (!informative.empty())
        write_file_if_changed(out / "eval" / "aggregate.json",
                              aggregate_json_text(aggregate(informative)));
    std::cerr << "pipeline: wrote deformation-severity report ("
              << informative.size() << " informative score(s))\n";
}

} // namespace

void register_cmd_pipeline(CLI::App& app) {
    auto opts = std::make_shared<PipelineOptions>();

    CLI::App* cmd = app.add_subcommand(
        "pipeline", "Full data flow: corrupt, deform, split, crop, eval");
    cmd->add_option("--input", opts->input, "Directory of clean images");
    cmd->add_option("--labels", opts->labels, "Directory of label rasters");
    cmd->add_option("--output", opts->output, "Output directory");
    cmd->add_option("--palette", opts->palette, "Palette CSV");
    cmd->add_option("--weather", opts->weather_kind, "fog|rain|snow|random (default random)")
        ->check(CLI::IsMember({"fog", "rain", "snow", "random"}));
    cmd->add_option("--strength", opts->strength, "Strength in [0,1] or 'random'");
    cmd->add_option("--deform", opts->deform_presets,
                    "Comma-separated presets or 'all' (default all)");
    cmd->add_option("--class", opts->class_name,
                    "Focus class for instance crops (default Car when present)");
    cmd->add_option("--min-area", opts->min_area, "Minimum component area (default 64)");
    cmd->add_option("--pad", opts->pad, "Crop padding (default 8)");
    cmd->add_option("--epsilon", opts->epsilon, "Eval stability constant (default 1e-6)");
    cmd->add_option("--seed", opts->seed, "Master seed");
    cmd->add_option("--jobs", opts->jobs, "Parallel workers")->check(CLI::PositiveNumber);
    cmd->add_option("--config", opts->config, "Pipeline config JSON; explicit flags win");

    cmd->callback([opts, cmd] {
        if (!opts->config.empty()) merge_config_file(*opts, *cmd);
        for (const auto& [value, flag] :
             {std::pair{&opts->input, "--input"}, {&opts->labels, "--labels"},
              {&opts->output, "--output"}, {&opts->palette, "--palette"}})
            if (value->empty())
                throw InvalidParameterError(std::string("pipeline: ") + flag +
                                            " is required (flag or config file)");
        run_pipeline(*opts, resolve_seed(opts->seed));
    });
}
