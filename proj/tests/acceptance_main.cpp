// Acceptance suite: runs every release criterion at its stated tolerance
// and prints one [PASS]/[FAIL] line per criterion. Exit code is the number
// of failed criteria. The pipeline-determinism criterion shells out to the
// CLI binary passed via --cli.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uaseg/elastic.hpp"
#include "uaseg/loss.hpp"
#include "uaseg/mask_ops.hpp"
#include "uaseg/metrics.hpp"
#include "uaseg/png_io.hpp"
#include "uaseg/rng.hpp"
#include "uaseg/sigmoid.hpp"
#include "uaseg/trainer.hpp"
#include "uaseg/weather.hpp"

namespace fs = std::filesystem;
using namespace uaseg;

namespace {

struct Harness {
    int failures = 0;

    void run(const std::string& name, const std::function<void()>& body) {
        const auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty()) {
            std::printf("[PASS] %s (%.2f s)\n", name.c_str(), seconds);
        } else {
            std::printf("[FAIL] %s (%.2f s): %s\n", name.c_str(), seconds, error.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

void require_close(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol))
        fail(what + ": got " + std::to_string(got) + ", want " + std::to_string(want) +
             " +/- " + std::to_string(tol));
}

// ---- criterion 1 -------------------------------------------------------

void criterion_report_arithmetic() {
    const auto single = [](double iou, double dice) {
        AggregateReport r;
        r.per_class["car"] = MeanScore{iou, dice, 1};
        r.overall = MeanScore{iou, dice, 1};
        return r;
    };

    // Finetuned vs zero-shot car columns of the frozen reference scores.
    const auto car = compare(single(0.156, 0.333), single(0.087, 0.142));
    require_close(car.per_class.at("car").iou_change_pct,
                  100.0 * (0.156 / 0.087 - 1.0), 1e-9, "car iou change (formula)");
    require_close(car.per_class.at("car").iou_change_pct, 79.13, 0.5,
                  "car iou change vs reference +79.13%");
    require_close(car.per_class.at("car").dice_change_pct, 134.51, 0.5,
                  "car dice change vs reference +134.51%");

    // Adapter vs zero-shot summary row of the reference scores.
    const auto ua = compare(single(0.4598, 0.6258), single(0.3221, 0.4809));
    require_close(ua.per_class.at("car").iou_change_pct, 42.75, 0.5,
                  "summary iou change vs reference ~42.7%");
    require_close(ua.per_class.at("car").dice_change_pct, 30.1, 0.5,
                  "summary dice change vs reference ~30%");
}

// ---- criterion 2 -------------------------------------------------------

void criterion_gradients() {
    SplitMix64 rng(900);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = oracle::random_instance(rng);
        LossConfig cfg;
        cfg.alpha = rng.next_double(0.0, 1.0);
        cfg.beta = rng.next_double(0.0, 0.5);

        const auto bce_res = bce(inst.logits, inst.target);
        worst = std::max(worst, oracle::max_rel_error(
                                    bce_res.grad.values(),
                                    oracle::central_diff(
                                        [&](const std::vector<double>& x) {
                                            LogitStack probe = inst.logits;
                                            probe.values() = x;
                                            return bce(probe, inst.target).value;
                                        },
                                        inst.logits.values())));

        const auto iou_res = soft_iou(inst.probs, inst.target, cfg.epsilon);
        worst = std::max(worst, oracle::max_rel_error(
                                    iou_res.grad.values(),
                                    oracle::central_diff(
                                        [&](const std::vector<double>& x) {
                                            ProbabilityStack probe = inst.probs;
                                            probe.values() = x;
                                            return soft_iou(probe, inst.target, cfg.epsilon)
                                                .loss;
                                        },
                                        inst.probs.values())));

        const auto dice_res = dice_loss(inst.probs, inst.target, cfg.epsilon);
        worst = std::max(worst, oracle::max_rel_error(
                                    dice_res.grad.values(),
                                    oracle::central_diff(
                                        [&](const std::vector<double>& x) {
                                            ProbabilityStack probe = inst.probs;
                                            probe.values() = x;
                                            return dice_loss(probe, inst.target, cfg.epsilon)
                                                .loss;
                                        },
                                        inst.probs.values())));

        const auto comb = combined_loss(inst.logits, inst.target, inst.u_map, cfg);
        worst = std::max(worst, oracle::max_rel_error(
                                    comb.grad.values(),
                                    oracle::central_diff(
                                        [&](const std::vector<double>& x) {
                                            LogitStack probe = inst.logits;
                                            probe.values() = x;
                                            return combined_loss(probe, inst.target,
                                                                 inst.u_map, cfg)
                                                .breakdown.total;
                                        },
                                        inst.logits.values())));
    }
    require(worst < 1e-5,
            "max relative gradient error " + std::to_string(worst) + " >= 1e-5");
}

// ---- criterion 3 -------------------------------------------------------

void criterion_metric_oracle() {
    const auto from_bits = [](unsigned bits) {
        BinaryMask mask(4, 2);
        for (int i = 0; i < 8; ++i) mask.cells()[i] = (bits >> i) & 1;
        return mask;
    };

    // Exhaustive: all 2^16 (pred, gt) pairs of 4x2 masks against the
    // independent popcount route.
    for (unsigned pred = 0; pred < 256; ++pred)
        for (unsigned gt = 0; gt < 256; ++gt) {
            const auto s = binary_iou_dice(from_bits(pred), from_bits(gt), 1e-6);
            const int inter = std::popcount(pred & gt);
            const int uni = std::popcount(pred | gt);
            const int pa = std::popcount(pred);
            const int ga = std::popcount(gt);
            require(s.intersection == inter && s.union_count == uni && s.pred_area == pa &&
                        s.gt_area == ga,
                    "count mismatch at pair (" + std::to_string(pred) + "," +
                        std::to_string(gt) + ")");
            if (uni == 0) {
                require(s.both_empty && s.iou == 1.0 && s.dice == 1.0,
                        "both-empty convention violated");
                continue;
            }
            require(std::fabs(s.iou - (inter + 1e-6) / (uni + 1e-6)) < 1e-12,
                    "iou ratio off at pair");
            require(std::fabs(s.dice - (2.0 * inter + 1e-6) / (pa + ga + 1e-6)) < 1e-12,
                    "dice ratio off at pair");
        }
}

// ---- criterion 4 -------------------------------------------------------

void criterion_dice_iou_identity() {
    SplitMix64 rng(901);
    int checked = 0;
    while (checked < 1000) {
        BinaryMask a(6, 6), b(6, 6);
        for (auto& v : a.cells()) v = rng.next_bernoulli(0.45);
        for (auto& v : b.cells()) v = rng.next_bernoulli(0.45);
        const auto s = binary_iou_dice(a, b, 0.0);
        if (s.union_count == 0) continue;
        require(std::fabs(s.dice - 2.0 * s.iou / (1.0 + s.iou)) < 1e-9,
                "dice != 2*iou/(1+iou)");
        ++checked;
    }
}

// ---- criterion 5 -------------------------------------------------------

void criterion_elastic_laws() {
    SplitMix64 rng(902);

    // alpha = 0: warp byte-identical.
    LabelRaster labels(64, 64);
    const std::vector<Rgb8> colors{{128, 64, 128}, {64, 0, 128}, {128, 128, 128}};
    for (auto& px : labels.pixels().cells()) px = colors[rng.next_below(colors.size())];
    const DisplacementField zero = make_field(64, 64, DeformSpec{0.0, 7.0, 4});
    require(warp_labels(labels, zero) == labels, "alpha=0 warp is not the identity");

    // Per-axis max-abs displacement equals alpha on 128x128 fields.
    for (double alpha : {5.0, 20.0, 30.0})
        for (double sigma : {4.0, 15.0}) {
            const DisplacementField field =
                make_field(128, 128, DeformSpec{alpha, sigma, 9});
            double mx = 0.0, my = 0.0;
            for (double v : field.dx.cells()) mx = std::max(mx, std::fabs(v));
            for (double v : field.dy.cells()) my = std::max(my, std::fabs(v));
            require(std::fabs(mx - alpha) < 1e-9, "dx peak != alpha");
            require(std::fabs(my - alpha) < 1e-9, "dy peak != alpha");
        }

    // Palette closure on 100 random label rasters.
    for (int trial = 0; trial < 100; ++trial) {
        LabelRaster raster(40, 40);
        std::vector<Rgb8> pal;
        const int k = 2 + static_cast<int>(rng.next_below(5));
        for (int c = 0; c < k; ++c)
            pal.push_back(Rgb8{static_cast<std::uint8_t>(rng.next_below(256)),
                               static_cast<std::uint8_t>(rng.next_below(256)),
                               static_cast<std::uint8_t>(rng.next_below(256))});
        for (auto& px : raster.pixels().cells()) px = pal[rng.next_below(pal.size())];

        const DisplacementField field = make_field(
            40, 40, DeformSpec{rng.next_double(1.0, 30.0), rng.next_double(2.0, 16.0),
                               1000 + static_cast<std::uint64_t>(trial)});
        const LabelRaster out = warp_labels(raster, field);
        for (const auto& px : out.pixels().cells())
            require(std::find(pal.begin(), pal.end(), px) != pal.end(),
                    "warp introduced a color outside the input palette");
    }
}

// ---- criterion 6 -------------------------------------------------------

void criterion_weather_laws() {
    SplitMix64 rng(903);
    RasterImage img(64, 64);
    for (auto& v : img.channels()) v = rng.next_double();

    for (WeatherKind kind : {WeatherKind::fog, WeatherKind::rain, WeatherKind::snow})
        require(apply_weather(img, WeatherSpec{kind, 0.0, 7}) == img,
                std::string("strength-0 identity broken for ") + std::string(to_string(kind)));

    const std::vector<double> strengths{0.0, 0.25, 0.5, 0.75, 1.0};

    // Fog: per-pixel deviation nondecreasing across the strength ladder.
    std::vector<RasterImage> fogged;
    for (double s : strengths)
        fogged.push_back(apply_weather(img, WeatherSpec{WeatherKind::fog, s, 7}));
    for (std::size_t step = 1; step < fogged.size(); ++step)
        for (std::size_t idx = 0; idx < img.channels().size(); ++idx) {
            const double lo = std::fabs(fogged[step - 1].channels()[idx] - img.channels()[idx]);
            const double hi = std::fabs(fogged[step].channels()[idx] - img.channels()[idx]);
            require(hi >= lo, "fog deviation decreased between strengths");
        }

    // Rain/snow: modified-pixel counts nondecreasing at a fixed seed.
    for (WeatherKind kind : {WeatherKind::rain, WeatherKind::snow}) {
        std::size_t prev = 0;
        for (double s : strengths) {
            const RasterImage out = apply_weather(img, WeatherSpec{kind, s, 7});
            std::size_t count = 0;
            for (std::size_t idx = 0; idx < img.channels().size(); ++idx)
                if (out.channels()[idx] != img.channels()[idx]) ++count;
            require(count >= prev, std::string(to_string(kind)) +
                                       " modified-pixel count decreased with strength");
            prev = count;
        }
        require(prev > 0, "strength-1 corruption modified nothing");
    }
}

// ---- criterion 7 -------------------------------------------------------

void criterion_mc_uncertainty() {
    SplitMix64 rng(904);

    ProbabilityStack sample(2, 6, 6);
    for (auto& v : sample.values()) v = rng.next_double();
    const std::vector<ProbabilityStack> identical(10, sample);
    const UncertaintyMap u_identical = mc_uncertainty(identical);
    for (double u : u_identical.cells())
        require(u == 0.0, "identical samples gave nonzero uncertainty");

    std::vector<ProbabilityStack> half;
    for (int s = 0; s < 10; ++s) half.emplace_back(1, 4, 4, s < 5 ? 0.0 : 1.0);
    const UncertaintyMap u_half = mc_uncertainty(half);
    for (double u : u_half.cells())
        require(u == 0.5, "half-0/half-1 stack did not give exactly 0.5");

    std::vector<ProbabilityStack> random_set;
    for (int s = 0; s < 9; ++s) {
        ProbabilityStack stack(1, 5, 5);
        for (auto& v : stack.values()) v = rng.next_double();
        random_set.push_back(std::move(stack));
    }
    const UncertaintyMap base = mc_uncertainty(random_set);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::size_t> order(random_set.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);
        std::vector<ProbabilityStack> shuffled;
        for (std::size_t idx : order) shuffled.push_back(random_set[idx]);
        require(mc_uncertainty(shuffled) == base,
                "uncertainty map changed under sample reordering");
    }
}

// ---- criterion 8 -------------------------------------------------------

void criterion_toy_training() {
    std::vector<TrainSample> dataset{make_disc_sample(32, 32, 1)};
    TrainConfig cfg;
    cfg.steps = 200;
    cfg.learning_rate = 0.3;
    cfg.seed = 1;

    const TrainResult result = train(ToyHead::init(1, 0.2, cfg.seed), dataset, cfg);
    require(result.trace.size() == 200, "trace length != steps");

    const auto probs = sigmoid_reduce(result.head.forward(dataset[0].image, false));
    const double final_iou = soft_iou(probs, dataset[0].masks, cfg.loss.epsilon).iou;
    require(final_iou > 0.9,
            "final soft IoU " + std::to_string(final_iou) + " <= 0.9 after 200 steps");

    double first = 0.0, last = 0.0;
    for (int i = 0; i < 10; ++i) {
        first += result.trace[i].loss.total;
        last += result.trace[190 + i].loss.total;
    }
    require(last / 10.0 <= first / 10.0, "last-10 mean total exceeds first-10 mean total");

    // noise_rate = 0 and beta = 0: bit-match against plain BCE/IoU training.
    TrainConfig quiet = cfg;
    quiet.steps = 25;
    quiet.loss.beta = 0.0;
    TrainConfig plain = quiet;
    plain.use_uncertainty = false;
    const TrainResult with_mc = train(ToyHead::init(1, 0.0, 3), dataset, quiet);
    const TrainResult without = train(ToyHead::init(1, 0.0, 3), dataset, plain);
    for (std::size_t i = 0; i < with_mc.trace.size(); ++i) {
        require(with_mc.trace[i].loss.total == without.trace[i].loss.total &&
                    with_mc.trace[i].loss.w_mean == without.trace[i].loss.w_mean &&
                    with_mc.trace[i].loss.bce == without.trace[i].loss.bce,
                "noise-0 trace deviates from plain-objective trace at step " +
                    std::to_string(i));
    }
    require(with_mc.head.flatten() == without.head.flatten(),
            "noise-0 parameters deviate from plain-objective parameters");
}

// ---- criterion 9 -------------------------------------------------------

struct CliEnv {
    fs::path cli;
    fs::path palette;
};

void build_corpus(const fs::path& images, const fs::path& labels, const Palette& palette) {
    fs::create_directories(images);
    fs::create_directories(labels);

    const Rgb8 road = *palette.color_of("Road");
    const Rgb8 car = *palette.color_of("Car");
    const Rgb8 sky = *palette.color_of("Sky");

    for (int n = 0; n < 20; ++n) {
        SplitMix64 rng(5000 + n);
        const int h = 48, w = 64;

        RasterImage img(h, w);
        for (auto& v : img.channels()) v = rng.next_double();

        LabelRaster raster(h, w, sky);
        for (int i = h / 2; i < h; ++i)
            for (int j = 0; j < w; ++j) raster.at(i, j) = road;
        // One or two car blobs per frame, large enough to survive min-area.
        const int cars = 1 + static_cast<int>(rng.next_below(2));
        for (int c = 0; c < cars; ++c) {
            const int ci = h / 2 + static_cast<int>(rng.next_below(h / 4));
            const int cj = 8 + static_cast<int>(rng.next_below(w - 24));
            for (int i = ci; i < std::min(h, ci + 10); ++i)
                for (int j = cj; j < std::min(w, cj + 14); ++j) raster.at(i, j) = car;
        }

        char name[32];
        std::snprintf(name, sizeof(name), "frame_%02d.png", n);
        save_image_png(images / name, img);
        save_label_png(labels / name, raster);
    }
}

void run_cli(const std::string& command) {
    const int rc = std::system(command.c_str());
    if (rc != 0) fail("command failed (exit " + std::to_string(rc) + "): " + command);
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        entries.emplace_back(fs::relative(entry.path(), root).string(), ss.str());
    }
    std::sort(entries.begin(), entries.end());
    return entries;
}

void criterion_pipeline_determinism(const CliEnv& env) {
    const fs::path work = fs::temp_directory_path() / "uaseg_acceptance_pipeline";
    fs::remove_all(work);
    const fs::path images = work / "images";
    const fs::path labels = work / "labels";
    build_corpus(images, labels, load_palette_csv(env.palette));

    const auto pipeline = [&](const fs::path& out, int jobs) {
        std::ostringstream cmd;
        cmd << env.cli.string() << " pipeline --input " << images.string() << " --labels "
            << labels.string() << " --output " << out.string() << " --palette "
            << env.palette.string() << " --seed 7 --jobs " << jobs << " 2>>"
            << (work / "log.txt").string();
        run_cli(cmd.str());
    };

    pipeline(work / "run1", 1);
    pipeline(work / "run2", 1);
    pipeline(work / "run3", 4);

    const auto tree1 = snapshot_tree(work / "run1");
    const auto tree2 = snapshot_tree(work / "run2");
    const auto tree3 = snapshot_tree(work / "run3");
    require(!tree1.empty(), "pipeline produced no output files");
    require(tree1 == tree2, "repeat run with --jobs 1 differs");
    require(tree1 == tree3, "run with --jobs 4 differs from --jobs 1");
}

} // namespace

int main(int argc, char** argv) {
    CliEnv env;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli") env.cli = argv[i + 1];
        if (flag == "--palette") env.palette = argv[i + 1];
    }

    Harness harness;
    harness.run("criterion 1: reference score-comparison arithmetic",
                criterion_report_arithmetic);
    harness.run("criterion 2: analytic gradients vs central finite differences",
                criterion_gradients);
    harness.run("criterion 3: binary metrics vs exhaustive pixel-count oracle",
                criterion_metric_oracle);
    harness.run("criterion 4: dice = 2*iou/(1+iou) on random binary pairs",
                criterion_dice_iou_identity);
    harness.run("criterion 5: elastic deformation laws", criterion_elastic_laws);
    harness.run("criterion 6: weather corruption laws", criterion_weather_laws);
    harness.run("criterion 7: Monte-Carlo uncertainty exactness", criterion_mc_uncertainty);
    harness.run("criterion 8: toy training convergence and plain-objective bit match",
                criterion_toy_training);

    if (env.cli.empty() || env.palette.empty()) {
        std::printf("[FAIL] criterion 9: pipeline determinism: missing --cli/--palette\n");
        ++harness.failures;
    } else {
        harness.run("criterion 9: pipeline determinism across reruns and --jobs",
                    [&] { criterion_pipeline_determinism(env); });
    }

    if (harness.failures == 0) std::printf("all acceptance criteria passed\n");
    return harness.failures;
}
