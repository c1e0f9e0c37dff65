#pragma once

#include <cstdint>
#include <vector>

#include "uaseg/grid.hpp"

namespace uaseg {

// Desk-scale differentiable segmentation head: a 3x3 convolution
// (3 -> kHidden channels, zero padding), tanh, then a 1x1 convolution
// down to the per-mask logits. The stochastic forward mode multiplies
// hidden activations by seeded Bernoulli(1 - noise_rate) masks.
class ToyHead {
public:
    static constexpr int kHidden = 8;
    static constexpr int kKernel = 3;
    static constexpr int kInChannels = 3;

    ToyHead() = default;

    // Fan-in-scaled uniform initialization, deterministic in the seed.
    static ToyHead init(int out_masks, double noise_rate, std::uint64_t seed);

    int out_masks() const { return out_masks_; }
    double noise_rate() const { return noise_rate_; }

    // Deterministic map when stochastic is false (the seed is then unused).
    LogitStack forward(const RasterImage& img, bool stochastic, std::uint64_t seed = 0) const;

    // Gradient of a scalar loss w.r.t. all parameters, given d loss / d logits
    // from the deterministic forward on the same image.
    struct ParamGrad {
        std::vector<double> conv1_w, conv1_b, conv2_w, conv2_b;

        void accumulate(const ParamGrad& other);
        void scale(double factor);
    };

    ParamGrad backward(const RasterImage& img, const Stack& logit_grad) const;
    void apply_update(const ParamGrad& grad, double learning_rate);

    // Flat little-endian double blob of all parameters, in manifest order
    // conv1_w, conv1_b, conv2_w, conv2_b.
    std::vector<double> flatten() const;

    // Finite-difference probes need direct parameter access.
    std::vector<double>& conv1_w() { return conv1_w_; }
    std::vector<double>& conv1_b() { return conv1_b_; }
    std::vector<double>& conv2_w() { return conv2_w_; }
    std::vector<double>& conv2_b() { return conv2_b_; }

private:
    int out_masks_ = 0;
    double noise_rate_ = 0.0;
    std::vector<double> conv1_w_; // [kHidden][kInChannels][kKernel][kKernel]
    std::vector<double> conv1_b_; // [kHidden]
    std::vector<double> conv2_w_; // [out_masks][kHidden]
    std::vector<double> conv2_b_; // [out_masks]
};

// Runs k seeded stochastic passes, sigmoid-reduces each, and returns the
// per-pixel Monte-Carlo standard deviation map. k must be >= 2.
UncertaintyMap mc_forward(const ToyHead& head, const RasterImage& img, int k,
                          std::uint64_t seed);

} // namespace uaseg
