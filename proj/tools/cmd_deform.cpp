#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "uaseg/elastic.hpp"
#include "uaseg/png_io.hpp"
#include "uaseg/rng.hpp"

namespace fs = std::filesystem;
using namespace uaseg;

namespace uaseg::cli::stages {
namespace {

LabelRaster deform_variant(const LabelRaster& labels, WeatherKind kind,
                           std::uint64_t file_seed, std::optional<double> alpha,
                           std::optional<double> sigma) {
    DeformSpec spec = deform_preset(kind);
    if (alpha) spec.alpha = *alpha;
    if (sigma) spec.sigma = *sigma;
    spec.seed = derive_seed(SeedSpec{file_seed},
                            std::string("deform.") + std::string(to_string(kind)));
    return warp_labels(labels, make_field(labels.height(), labels.width(), spec));
}

} // namespace

void run_deform(const DeformStageOptions& opts) {
    ensure_output_distinct(opts.labels_dir, opts.output_dir);
    const auto files = list_png_files(opts.labels_dir);
    if (files.empty()) throw IoError("no PNG files in " + opts.labels_dir.string());
    if (opts.presets.empty()) throw InvalidParameterError("deform: no presets selected");
    if ((opts.alpha || opts.sigma) && opts.presets.size() != 1)
        throw InvalidParameterError(
            "deform: --alpha/--sigma overrides require a single preset");
    ensure_dir(opts.output_dir);

    parallel_for(files.size(), opts.jobs, [&](std::size_t idx) {
        const fs::path& file = files[idx];
        const std::uint64_t file_seed =
            derive_seed(SeedSpec{opts.seed}, file.filename().string());
        const LabelRaster labels = load_label_png(file);
        const std::string stem = file.stem().string();

        // The untouched annotation rides along as <stem>.png.
        write_png_if_changed(opts.output_dir / file.filename(),
                             [&](const fs::path& p) { save_label_png(p, labels); });
        for (const auto& preset : opts.presets) {
            const WeatherKind kind = weather_kind_from_string(preset);
            const LabelRaster warped =
                deform_variant(labels, kind, file_seed, opts.alpha, opts.sigma);
            write_png_if_changed(opts.output_dir / (stem + "_" + preset + ".png"),
                                 [&](const fs::path& p) { save_label_png(p, warped); });
        }
    });
    std::cerr << "deform: processed " << files.size() << " file(s) into "
              << opts.output_dir.string() << "\n";
}

} // namespace uaseg::cli::stages

void register_cmd_deform(CLI::App& app) {
    struct Options {
        std::string labels, output;
        std::string preset = "all";
        std::optional<double> alpha, sigma;
        std::optional<std::uint64_t> seed;
        int jobs = 1;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd =
        app.add_subcommand("deform", "Elastically deform label rasters into variants");
    cmd->add_option("--labels", opts->labels, "Directory of label PNGs")->required();
    cmd->add_option("--output", opts->output, "Output directory")->required();
    cmd->add_option("--preset", opts->preset, "fog|rain|snow|all (default all)")
        ->check(CLI::IsMember({"fog", "rain", "snow", "all"}));
    cmd->add_option("--alpha", opts->alpha, "Override peak displacement (single preset only)");
    cmd->add_option("--sigma", opts->sigma, "Override smoothing std (single preset only)");
    cmd->add_option("--seed", opts->seed, "Master seed");
    cmd->add_option("--jobs", opts->jobs, "Parallel workers")->check(CLI::PositiveNumber);

    cmd->callback([opts] {
        uaseg::cli::stages::DeformStageOptions stage;
        stage.labels_dir = opts->labels;
        stage.output_dir = opts->output;
        if (opts->preset == "all")
            stage.presets = {"fog", "rain", "snow"};
        else
            stage.presets = {opts->preset};
        stage.alpha = opts->alpha;
        stage.sigma = opts->sigma;
        stage.seed = uaseg::cli::resolve_seed(opts->seed);
        stage.jobs = opts->jobs;
        uaseg::cli::stages::run_deform(stage);
    });
}
