#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "uaseg/grid.hpp"
#include "uaseg/loss.hpp"
#include "uaseg/toy_head.hpp"

namespace uaseg {

// Gradient-descent settings for the toy finetuning loop. log_every only
// paces progress reporting; the trace always records every step. With
// use_uncertainty false the loop trains on the plain BCE/IoU mix, i.e.
// the combined objective with U identically zero and no MC passes.
struct TrainConfig {
    int steps = 200;
    double learning_rate = 0.3;
    LossConfig loss;
    std::uint64_t seed = 0;
    int log_every = 10;
    bool use_uncertainty = true;

    void validate() const;
};

struct TrainSample {
    RasterImage image;
    std::vector<BinaryMask> masks;
};

struct TraceRow {
    int step = 0;
    LossBreakdown loss;
};

struct TrainResult {
    ToyHead head;
    std::vector<TraceRow> trace;
};

// Full-batch gradient descent: per step, the uncertainty map comes from
// mc_forward, the loss gradient from the deterministic forward, and the
// parameter update from the mean analytic gradient over the dataset.
// Throws NumericError with the step index if the loss stops being finite.
TrainResult train(ToyHead head, std::span<const TrainSample> dataset, const TrainConfig& cfg);

// Synthetic tasks with exact ground truth. The disc task is a bright disc
// on a dark noisy background, separable by channel intensity; the
// two-class variant overlaps the intensity ranges so stochastic passes
// disagree and U is nonzero.
TrainSample make_disc_sample(int height, int width, std::uint64_t seed);
TrainSample make_two_class_sample(int height, int width, std::uint64_t seed);

// CSV with header step,bce,iou_loss,c,w_mean,r,total.
void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace);

// params.bin: flat little-endian float64 blob in the order conv1_w,
// conv1_b, conv2_w, conv2_b. params.json: the shape manifest.
void write_head_params(const std::filesystem::path& dir, const ToyHead& head);

} // namespace uaseg
