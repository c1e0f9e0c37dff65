#include "uaseg/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "uaseg/rng.hpp"

namespace uaseg {
namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

void paint_disc(RasterImage& img, BinaryMask& mask, SplitMix64& rng, double ci, double cj,
                double radius, double lo, double hi) {
    for (int i = 0; i < img.height(); ++i)
        for (int j = 0; j < img.width(); ++j) {
            const double d2 = (i - ci) * (i - ci) + (j - cj) * (j - cj);
            if (d2 > radius * radius) continue;
            mask.at(i, j) = 1;
            const double base = rng.next_double(lo, hi);
            for (int c = 0; c < 3; ++c)
                img.at(i, j, c) = clamp01(base + rng.next_double(-0.05, 0.05));
        }
}

} // namespace

void TrainConfig::validate() const {
    if (steps < 1) throw InvalidParameterError("train config: steps must be >= 1");
    if (!(learning_rate > 0.0))
        throw InvalidParameterError("train config: learning_rate must be > 0");
    if (log_every < 1) throw InvalidParameterError("train config: log_every must be >= 1");
    loss.validate();
}

TrainResult train(ToyHead head, std::span<const TrainSample> dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw InvalidInputError("train: empty dataset");
    for (const auto& sample : dataset) {
        if (sample.masks.empty()) throw InvalidInputError("train: sample without masks");
        if (static_cast<int>(sample.masks.size()) != head.out_masks())
            throw InvalidInputError("train: mask count does not match head output");
        for (const auto& m : sample.masks)
            if (m.height() != sample.image.height() || m.width() != sample.image.width())
                throw InvalidInputError("train: image and mask dimensions differ");
    }

    const double inv_items = 1.0 / static_cast<double>(dataset.size());
    TrainResult result;
    result.trace.reserve(cfg.steps);

    for (int step = 0; step < cfg.steps; ++step) {
        ToyHead::ParamGrad accum;
        LossBreakdown mean;
        for (std::size_t item = 0; item < dataset.size(); ++item) {
            const auto& sample = dataset[item];

            UncertaintyMap u_map(sample.image.height(), sample.image.width(), 0.0);
            if (cfg.use_uncertainty) {
                const std::uint64_t mc_seed = derive_seed(
                    SeedSpec{cfg.seed},
                    "train.mc." + std::to_string(step) + "." + std::to_string(item));
                u_map = mc_forward(head, sample.image, cfg.loss.mc_samples, mc_seed);
            }

            const LogitStack logits = head.forward(sample.image, false);
            CombinedResult loss;
            try {
                loss = combined_loss(logits, sample.masks, u_map, cfg.loss);
            } catch (const NumericError& e) {
                throw NumericError("training diverged at step " + std::to_string(step) + ": " +
                                   e.what());
            }

            accum.accumulate(head.backward(sample.image, loss.grad));
            mean.bce += loss.breakdown.bce;
            mean.iou_loss += loss.breakdown.iou_loss;
            mean.c += loss.breakdown.c;
            mean.w_mean += loss.breakdown.w_mean;
            mean.r += loss.breakdown.r;
        }

        mean.bce *= inv_items;
        mean.iou_loss *= inv_items;
        mean.c *= inv_items;
        mean.w_mean *= inv_items;
        mean.r *= inv_items;
        mean.total = mean.w_mean + mean.r;
        if (!std::isfinite(mean.total))
            throw NumericError("training diverged at step " + std::to_string(step));
        result.trace.push_back(TraceRow{step, mean});

        accum.scale(inv_items);
        head.apply_update(accum, cfg.learning_rate);
    }

    result.head = std::move(head);
    return result;
}

TrainSample make_disc_sample(int height, int width, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(SeedSpec{seed}, "task.disc"));

    TrainSample sample;
    sample.image = RasterImage(height, width);
    sample.masks.assign(1, BinaryMask(height, width, 0));
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) {
            const double base = rng.next_double(0.05, 0.30);
            for (int c = 0; c < 3; ++c)
                sample.image.at(i, j, c) = clamp01(base + rng.next_double(-0.05, 0.05));
        }

    const double ci = rng.next_double(0.35, 0.65) * height;
    const double cj = rng.next_double(0.35, 0.65) * width;
    const double radius = rng.next_double(0.18, 0.30) * std::min(height, width);
    paint_disc(sample.image, sample.masks[0], rng, ci, cj, radius, 0.70, 0.95);
    return sample;
}

TrainSample make_two_class_sample(int height, int width, std::uint64_t seed) {
    SplitMix64 rng(derive_seed(SeedSpec{seed}, "task.two_class"));

    TrainSample sample;
    sample.image = RasterImage(height, width);
    sample.masks.assign(2, BinaryMask(height, width, 0));
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) {
            const double base = rng.next_double(0.10, 0.50);
            for (int c = 0; c < 3; ++c)
                sample.image.at(i, j, c) = clamp01(base + rng.next_double(-0.05, 0.05));
        }

    // Two discs in opposite halves with intensity ranges that overlap the
    // background, leaving genuinely ambiguous pixels.
    const double radius = rng.next_double(0.15, 0.22) * std::min(height, width);
    const double ci0 = rng.next_double(0.30, 0.45) * height;
    const double cj0 = rng.next_double(0.20, 0.35) * width;
    paint_disc(sample.image, sample.masks[0], rng, ci0, cj0, radius, 0.50, 0.90);
    const double ci1 = rng.next_double(0.55, 0.70) * height;
    const double cj1 = rng.next_double(0.65, 0.80) * width;
    paint_disc(sample.image, sample.masks[1], rng, ci1, cj1, radius, 0.30, 0.70);
    return sample;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "step,bce,iou_loss,c,w_mean,r,total\n";
    char buf[160];
    for (const auto& row : trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.step,
                      row.loss.bce, row.loss.iou_loss, row.loss.c, row.loss.w_mean, row.loss.r,
                      row.loss.total);
        out << buf;
    }
}

void write_head_params(const std::filesystem::path& dir, const ToyHead& head) {
    const std::vector<double> flat = head.flatten();

    std::ofstream bin(dir / "params.bin", std::ios::binary);
    if (!bin) throw IoError("cannot write " + (dir / "params.bin").string());
    bin.write(reinterpret_cast<const char*>(flat.data()),
              static_cast<std::streamsize>(flat.size() * sizeof(double)));

    const int n = head.out_masks();
    nlohmann::json manifest;
    manifest["dtype"] = "float64";
    manifest["byte_order"] = "little";
    manifest["element_count"] = flat.size();
    manifest["tensors"] = nlohmann::json::array();
    std::size_t offset = 0;
    const auto add = [&](const char* name, std::vector<std::size_t> shape) {
        std::size_t count = 1;
        for (auto d : shape) count *= d;
        manifest["tensors"].push_back(
            {{"name", name}, {"shape", shape}, {"element_offset", offset}});
        offset += count;
    };
    add("conv1_w", {ToyHead::kHidden, ToyHead::kInChannels, ToyHead::kKernel, ToyHead::kKernel});
    add("conv1_b", {ToyHead::kHidden});
    add("conv2_w", {static_cast<std::size_t>(n), ToyHead::kHidden});
    add("conv2_b", {static_cast<std::size_t>(n)});

    std::ofstream json_out(dir / "params.json");
    if (!json_out) throw IoError("cannot write " + (dir / "params.json").string());
    json_out << manifest.dump(2) << '\n';
}

} // namespace uaseg
