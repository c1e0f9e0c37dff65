#include <benchmark/benchmark.h>

#include "uaseg/elastic.hpp"
#include "uaseg/loss.hpp"
#include "uaseg/mask_ops.hpp"
#include "uaseg/metrics.hpp"
#include "uaseg/rng.hpp"
#include "uaseg/sigmoid.hpp"
#include "uaseg/trainer.hpp"
#include "uaseg/weather.hpp"

using namespace uaseg;

namespace {

RasterImage random_image(int side, std::uint64_t seed) {
    SplitMix64 rng(seed);
    RasterImage img(side, side);
    for (auto& v : img.channels()) v = rng.next_double();
    return img;
}

void BM_ApplyWeather(benchmark::State& state, WeatherKind kind) {
    const RasterImage img = random_image(256, 1);
    const WeatherSpec spec{kind, 0.7, 42};
    for (auto _ : state) benchmark::DoNotOptimize(apply_weather(img, spec));
}

void BM_MakeField(benchmark::State& state) {
    const DeformSpec spec{20.0, static_cast<double>(state.range(0)), 7};
    for (auto _ : state) benchmark::DoNotOptimize(make_field(256, 256, spec));
}

void BM_WarpLabels(benchmark::State& state) {
    SplitMix64 rng(3);
    LabelRaster labels(256, 256);
    const Rgb8 colors[3] = {{128, 64, 128}, {64, 0, 128}, {128, 128, 128}};
    for (auto& px : labels.pixels().cells()) px = colors[rng.next_below(3)];
    const DisplacementField field = make_field(256, 256, DeformSpec{20.0, 7.0, 5});
    for (auto _ : state) benchmark::DoNotOptimize(warp_labels(labels, field));
}

void BM_CombinedLoss(benchmark::State& state) {
    SplitMix64 rng(4);
    const int n = 3, side = 64;
    LogitStack logits(n, side, side);
    for (auto& v : logits.values()) v = rng.next_double(-4.0, 4.0);
    std::vector<BinaryMask> target(n, BinaryMask(side, side));
    for (auto& mask : target)
        for (auto& v : mask.cells()) v = rng.next_bernoulli(0.5);
    UncertaintyMap u_map(side, side);
    for (auto& v : u_map.cells()) v = rng.next_double(0.0, 0.5);
    const LossConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(combined_loss(logits, target, u_map, cfg));
}

void BM_BinaryIouDice(benchmark::State& state) {
    SplitMix64 rng(5);
    BinaryMask pred(512, 512), gt(512, 512);
    for (auto& v : pred.cells()) v = rng.next_bernoulli(0.3);
    for (auto& v : gt.cells()) v = rng.next_bernoulli(0.3);
    for (auto _ : state) benchmark::DoNotOptimize(binary_iou_dice(pred, gt, 1e-6));
}

void BM_ToyTrainStep(benchmark::State& state) {
    const std::vector<TrainSample> dataset{make_disc_sample(32, 32, 9)};
    TrainConfig cfg;
    cfg.steps = 1;
    cfg.seed = 9;
    for (auto _ : state) {
        ToyHead head = ToyHead::init(1, 0.2, 9);
        benchmark::DoNotOptimize(train(std::move(head), dataset, cfg));
    }
}

void BM_McForward(benchmark::State& state) {
    const TrainSample sample = make_disc_sample(32, 32, 10);
    const ToyHead head = ToyHead::init(1, 0.2, 10);
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_forward(head, sample.image, 10, 11));
}

} // namespace

BENCHMARK_CAPTURE(BM_ApplyWeather, fog, WeatherKind::fog);
BENCHMARK_CAPTURE(BM_ApplyWeather, rain, WeatherKind::rain);
BENCHMARK_CAPTURE(BM_ApplyWeather, snow, WeatherKind::snow);
BENCHMARK(BM_MakeField)->Arg(4)->Arg(15);
BENCHMARK(BM_WarpLabels);
BENCHMARK(BM_CombinedLoss);
BENCHMARK(BM_BinaryIouDice);
BENCHMARK(BM_ToyTrainStep);
BENCHMARK(BM_McForward);
BENCHMARK_MAIN();
