// End-to-end checks of the CLI surface: file formats, exit codes, and the
// documented subcommand behaviors, driven through the real binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uaseg/metrics.hpp"
#include "uaseg/png_io.hpp"
#include "uaseg/rng.hpp"

namespace fs = std::filesystem;
using namespace uaseg;

namespace {

struct Context {
    fs::path cli;
    fs::path palette;
    fs::path work;
    int failures = 0;

    void check(bool cond, const std::string& what) {
        if (cond) {
            std::printf("[ok] %s\n", what.c_str());
        } else {
            std::printf("[FAILED] %s\n", what.c_str());
            ++failures;
        }
    }
};

int run(const Context& ctx, const std::string& args) {
    const std::string cmd = ctx.cli.string() + " " + args + " >>" +
                            (ctx.work / "cli_log.txt").string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void make_corpus(const Context& ctx) {
    fs::create_directories(ctx.work / "images");
    fs::create_directories(ctx.work / "labels");
    const Rgb8 sky{128, 128, 128}, road{128, 64, 128}, car{64, 0, 128};
    for (int n = 0; n < 3; ++n) {
        SplitMix64 rng(70 + n);
        RasterImage img(32, 48);
        for (auto& v : img.channels()) v = rng.next_double();
        LabelRaster lab(32, 48, sky);
        for (int i = 16; i < 32; ++i)
            for (int j = 0; j < 48; ++j) lab.at(i, j) = road;
        for (int i = 18; i < 28; ++i)
            for (int j = 8 + 4 * n; j < 24 + 4 * n; ++j) lab.at(i, j) = car;
        const std::string name = "item_" + std::to_string(n) + ".png";
        save_image_png(ctx.work / "images" / name, img);
        save_label_png(ctx.work / "labels" / name, lab);
    }
}

void test_exit_codes(Context& ctx) {
    ctx.check(run(ctx, "bogus-subcommand") == 1, "unknown subcommand exits 1");
    ctx.check(run(ctx, "weather") == 1, "missing required flags exit 1");
    ctx.check(run(ctx, "weather --input " + (ctx.work / "images").string() + " --output " +
                           (ctx.work / "w_bad").string() +
                           " --kind fog --strength 1.7 --seed 1") == 1,
              "out-of-range strength exits 1");
    ctx.check(run(ctx, "eval --pred " + (ctx.work / "nope").string() + " --gt " +
                           (ctx.work / "labels").string() + " --palette " +
                           ctx.palette.string() + " --out " + (ctx.work / "e").string()) == 2,
              "missing input directory exits 2");
    ctx.check(run(ctx, "--help") == 0, "--help exits 0");
    ctx.check(run(ctx, "weather --input " + (ctx.work / "images").string() + " --output " +
                           (ctx.work / "images").string() + " --kind fog --strength 0.5" +
                           " --seed 1") == 1,
              "aliased input/output directories exit 1");
}

void test_weather_identity(Context& ctx) {
    const fs::path out = ctx.work / "w_zero";
    ctx.check(run(ctx, "weather --input " + (ctx.work / "images").string() + " --output " +
                           out.string() + " --kind fog --strength 0 --seed 3") == 0,
              "strength-0 weather run succeeds");
    bool identical = true;
    for (int n = 0; n < 3; ++n) {
        const std::string name = "item_" + std::to_string(n) + ".png";
        identical = identical &&
                    slurp(ctx.work / "images" / name) == slurp(out / name);
    }
    ctx.check(identical, "strength-0 outputs are byte-identical to inputs");
}

void test_eval_self(Context& ctx) {
    const fs::path out = ctx.work / "eval_self";
    ctx.check(run(ctx, "eval --pred " + (ctx.work / "labels").string() + " --gt " +
                           (ctx.work / "labels").string() + " --palette " +
                           ctx.palette.string() + " --out " + out.string()) == 0,
              "self-eval run succeeds");

    const auto agg = load_aggregate_json(out / "aggregate.json");
    bool all_perfect = agg.overall.iou == 1.0 && agg.overall.dice == 1.0;
    for (const auto& [name, cls] : agg.per_class)
        all_perfect = all_perfect && cls.iou == 1.0 && cls.dice == 1.0;
    ctx.check(all_perfect, "pred==gt aggregate is all 1.0");

    // CSV surface: header plus item,class rows with the both_empty flag.
    const std::string csv = slurp(out / "pairs.csv");
    ctx.check(csv.rfind("item_id,class,iou,dice,flag\n", 0) == 0, "pairs.csv header");
    ctx.check(csv.find("both_empty") != std::string::npos,
              "absent classes are flagged both_empty");
}

void test_uncertainty_render(Context& ctx) {
    // Identical samples: all-black heatmap, mean 0.
    const fs::path flat = ctx.work / "usamples_flat";
    fs::create_directories(flat);
    for (int s = 0; s < 4; ++s)
        save_gray_png(flat / ("s" + std::to_string(s) + ".png"), Grid<double>(8, 8, 0.25));
    const fs::path flat_out = ctx.work / "u_flat";
    ctx.check(run(ctx, "uncertainty --samples " + flat.string() + " --out " +
                           flat_out.string()) == 0,
              "uncertainty run succeeds on identical samples");
    const Grid<double> black = load_gray_png(flat_out / "uncertainty.png");
    bool all_black = true;
    for (double v : black.cells()) all_black = all_black && v == 0.0;
    ctx.check(all_black, "identical samples give an all-black heatmap");

    // Half-0/half-1 samples: all-white heatmap, mean 0.5.
    const fs::path half = ctx.work / "usamples_half";
    fs::create_directories(half);
    for (int s = 0; s < 10; ++s)
        save_gray_png(half / ("s" + std::to_string(s) + ".png"),
                      Grid<double>(8, 8, s < 5 ? 0.0 : 1.0));
    const fs::path half_out = ctx.work / "u_half";
    run(ctx, "uncertainty --samples " + half.string() + " --out " + half_out.string());
    const Grid<double> white = load_gray_png(half_out / "uncertainty.png");
    bool all_white = true;
    for (double v : white.cells()) all_white = all_white && v == 1.0;
    ctx.check(all_white, "half-0/half-1 samples give an all-white heatmap");

    nlohmann::json stats;
    std::ifstream(half_out / "uncertainty.json") >> stats;
    ctx.check(stats["mean"].get<double>() == 0.5, "stats JSON mean is 0.5");

    // Stats mean matches the decoded heatmap / 2 within quantization error.
    const fs::path mixed = ctx.work / "usamples_mixed";
    fs::create_directories(mixed);
    SplitMix64 rng(99);
    for (int s = 0; s < 6; ++s) {
        Grid<double> g(12, 12);
        for (auto& v : g.cells()) v = rng.next_double();
        save_gray_png(mixed / ("s" + std::to_string(s) + ".png"), g);
    }
    const fs::path mixed_out = ctx.work / "u_mixed";
    run(ctx, "uncertainty --samples " + mixed.string() + " --out " + mixed_out.string());
    nlohmann::json mixed_stats;
    std::ifstream(mixed_out / "uncertainty.json") >> mixed_stats;
    const Grid<double> heat = load_gray_png(mixed_out / "uncertainty.png");
    double decoded_mean = 0.0;
    for (double v : heat.cells()) decoded_mean += v * 0.5;
    decoded_mean /= static_cast<double>(heat.size());
    ctx.check(std::abs(mixed_stats["mean"].get<double>() - decoded_mean) <= 0.5 / 255.0,
              "stats mean matches decoded heatmap within quantization error");
}

void test_pipeline_restart(Context& ctx) {
    const fs::path out = ctx.work / "pipe";
    const std::string args = "pipeline --input " + (ctx.work / "images").string() +
                             " --labels " + (ctx.work / "labels").string() + " --output " +
                             out.string() + " --palette " + ctx.palette.string() +
                             " --seed 11 --jobs 2";
    ctx.check(run(ctx, args) == 0, "pipeline run succeeds");

    std::vector<std::pair<std::string, fs::file_time_type>> before;
    for (const auto& entry : fs::recursive_directory_iterator(out))
        if (entry.is_regular_file())
            before.emplace_back(entry.path().string(), entry.last_write_time());
    std::sort(before.begin(), before.end());

    ctx.check(run(ctx, args) == 0, "pipeline rerun succeeds");
    std::vector<std::pair<std::string, fs::file_time_type>> after;
    for (const auto& entry : fs::recursive_directory_iterator(out))
        if (entry.is_regular_file())
            after.emplace_back(entry.path().string(), entry.last_write_time());
    std::sort(after.begin(), after.end());
    ctx.check(before == after, "rerunning completed stages rewrites nothing");
}

void test_train_toy_outputs(Context& ctx) {
    const fs::path out = ctx.work / "toy";
    ctx.check(run(ctx, "train-toy --steps 10 --seed 5 --mc-samples 2 --out " +
                           out.string()) == 0,
              "train-toy run succeeds");
    const std::string trace = slurp(out / "trace.csv");
    ctx.check(trace.rfind("step,bce,iou_loss,c,w_mean,r,total\n", 0) == 0,
              "trace.csv header");
    int lines = 0;
    for (char c : trace)
        if (c == '\n') ++lines;
    ctx.check(lines == 11, "trace.csv has one row per step");

    nlohmann::json manifest;
    std::ifstream(out / "params.json") >> manifest;
    const auto blob_bytes = fs::file_size(out / "params.bin");
    ctx.check(manifest["element_count"].get<std::size_t>() * sizeof(double) == blob_bytes,
              "params.bin size matches the manifest element count");
    ctx.check(manifest["dtype"] == "float64" && manifest["tensors"].size() == 4,
              "params.json declares the four tensors");
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli") ctx.cli = argv[i + 1];
        if (flag == "--palette") ctx.palette = argv[i + 1];
    }
    if (ctx.cli.empty() || ctx.palette.empty()) {
        std::fprintf(stderr, "usage: uaseg_cli_tests --cli <binary> --palette <csv>\n");
        return 2;
    }

    ctx.work = fs::temp_directory_path() / "uaseg_cli_tests";
    fs::remove_all(ctx.work);
    fs::create_directories(ctx.work);
    make_corpus(ctx);

    test_exit_codes(ctx);
    test_weather_identity(ctx);
    test_eval_self(ctx);
    test_uncertainty_render(ctx);
    test_pipeline_restart(ctx);
    test_train_toy_outputs(ctx);

    if (ctx.failures == 0) std::printf("all CLI integration checks passed\n");
    return ctx.failures;
}
