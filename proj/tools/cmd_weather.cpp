#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "uaseg/png_io.hpp"
#include "uaseg/rng.hpp"
#include "uaseg/weather.hpp"

namespace fs = std::filesystem;
using namespace uaseg;

namespace uaseg::cli::stages {

void run_weather(const WeatherStageOptions& opts) {
    ensure_output_distinct(opts.input_dir, opts.output_dir);
    const auto files = list_png_files(opts.input_dir);
    if (files.empty()) throw IoError("no PNG files in " + opts.input_dir.string());
    ensure_dir(opts.output_dir);

    const bool random_kind = opts.kind == "random";
    const bool random_strength = opts.strength == "random";
    WeatherKind fixed_kind = WeatherKind::fog;
    double fixed_strength = 0.0;
    if (!random_kind) fixed_kind = weather_kind_from_string(opts.kind);
    if (!random_strength) {
        try {
            fixed_strength = std::stod(opts.strength);
        } catch (const std::exception&) {
            throw InvalidParameterError("--strength must be a number or 'random'");
        }
        if (!(fixed_strength >= 0.0 && fixed_strength <= 1.0))
            throw InvalidParameterError("--strength must lie in [0,1]");
    }

    parallel_for(files.size(), opts.jobs, [&](std::size_t idx) {
        const fs::path& file = files[idx];
        const std::uint64_t item_seed =
            derive_seed(SeedSpec{opts.seed}, file.filename().string());

        WeatherSpec spec = sample_weather(item_seed);
        if (!random_kind) spec.kind = fixed_kind;
        if (!random_strength) spec.strength = fixed_strength;

        const RasterImage out = apply_weather(load_image_png(file), spec);
        write_png_if_changed(opts.output_dir / file.filename(),
                             [&](const fs::path& p) { save_image_png(p, out); });
    });
    std::cerr << "weather: processed " << files.size() << " file(s) into "
              << opts.output_dir.string() << "\n";
}

} // namespace uaseg::cli::stages

void register_cmd_weather(CLI::App& app) {
    struct Options {
        std::string input, output;
        std::string kind = "random";
        std::string strength = "random";
        std::optional<std::uint64_t> seed;
        int jobs = 1;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd = app.add_subcommand("weather", "Corrupt images with fog, rain, or snow");
    cmd->add_option("--input", opts->input, "Directory of clean PNG images")->required();
    cmd->add_option("--output", opts->output, "Output directory")->required();
    cmd->add_option("--kind", opts->kind, "fog|rain|snow|random (default random)")
        ->check(CLI::IsMember({"fog", "rain", "snow", "random"}));
    cmd->add_option("--strength", opts->strength, "Strength in [0,1] or 'random'");
    cmd->add_option("--seed", opts->seed, "Master seed (generated and printed if absent)");
    cmd->add_option("--jobs", opts->jobs, "Parallel workers (default 1)")
        ->check(CLI::PositiveNumber);

    cmd->callback([opts] {
        uaseg::cli::stages::WeatherStageOptions stage;
        stage.input_dir = opts->input;
        stage.output_dir = opts->output;
        stage.kind = opts->kind;
        stage.strength = opts->strength;
        stage.seed = uaseg::cli::resolve_seed(opts->seed);
        stage.jobs = opts->jobs;
        uaseg::cli::stages::run_weather(stage);
    });
}
