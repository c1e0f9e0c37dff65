#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace uaseg::cli {

// Sorted *.png paths directly inside dir. Throws IoError if dir is missing.
std::vector<std::filesystem::path> list_png_files(const std::filesystem::path& dir);

void ensure_dir(const std::filesystem::path& dir);

// File-level parallelism over [0,count). Exceptions from workers are
// rethrown on the caller thread; outputs must not depend on scheduling.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// Writes only when content differs from what is already on disk, so
// rerunning a completed stage is a no-op.
bool write_file_if_changed(const std::filesystem::path& path, const std::string& content);

// Renders a PNG through save_fn into a temp sibling, then swaps it in only
// on content change.
bool write_png_if_changed(const std::filesystem::path& path,
                          const std::function<void(const std::filesystem::path&)>& save_fn);

// The --seed contract: absent a user seed, one is generated and printed to
// stderr so the run stays reproducible after the fact.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed);

// Subcommands never write into their input directories; reject aliased
// input/output paths before any work starts.
void ensure_output_distinct(const std::filesystem::path& input,
                            const std::filesystem::path& output);

std::string sanitize_name(const std::string& name);

} // namespace uaseg::cli

void register_cmd_weather(CLI::App& app);
void register_cmd_deform(CLI::App& app);
void register_cmd_palette_split(CLI::App& app);
void register_cmd_crop_instances(CLI::App& app);
void register_cmd_eval(CLI::App& app);
void register_cmd_compare(CLI::App& app);
void register_cmd_uncertainty(CLI::App& app);
void register_cmd_train_toy(CLI::App& app);
void register_cmd_pipeline(CLI::App& app);

// Stage implementations shared between the pipeline command and the
// standalone subcommands.
namespace uaseg::cli::stages {

struct EvalOptions {
    std::filesystem::path pred_dir;
    std::filesystem::path gt_dir;
    std::filesystem::path palette_path;
    std::filesystem::path out_dir;
    double epsilon = 1e-6;
    int jobs = 1;
};

// Scores every common stem per palette class; writes pairs.csv and
// aggregate.json (both-empty pairs stay in the CSV, flagged, but are left
// out of the aggregate means).
void run_eval(const EvalOptions& opts);

struct WeatherStageOptions {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;
    std::string kind = "random";     // fog|rain|snow|random
    std::string strength = "random"; // float or "random"
    std::uint64_t seed = 0;
    int jobs = 1;
};

void run_weather(const WeatherStageOptions& opts);

struct DeformStageOptions {
    std::filesystem::path labels_dir;
    std::filesystem::path output_dir;
    std::vector<std::string> presets; // subset of fog/rain/snow
    std::optional<double> alpha;      // overrides, single preset only
    std::optional<double> sigma;
    std::uint64_t seed = 0;
    int jobs = 1;
};

void run_deform(const DeformStageOptions& opts);

} // namespace uaseg::cli::stages
