#include "uaseg/toy_head.hpp"

#include <cmath>
#include <string>

#include "uaseg/loss.hpp"
#include "uaseg/rng.hpp"
#include "uaseg/sigmoid.hpp"

namespace uaseg {
namespace {

constexpr int kH = ToyHead::kHidden;
constexpr int kK = ToyHead::kKernel;
constexpr int kC = ToyHead::kInChannels;

inline std::size_t w1_index(int c, int ci, int di, int dj) {
    return ((static_cast<std::size_t>(c) * kC + ci) * kK + di) * kK + dj;
}

} // namespace

ToyHead ToyHead::init(int out_masks, double noise_rate, std::uint64_t seed) {
    if (out_masks < 1) throw InvalidParameterError("ToyHead: out_masks must be >= 1");
    if (!(noise_rate >= 0.0 && noise_rate < 1.0))
        throw InvalidParameterError("ToyHead: noise_rate must lie in [0,1)");

    ToyHead head;
    head.out_masks_ = out_masks;
    head.noise_rate_ = noise_rate;
    head.conv1_w_.resize(static_cast<std::size_t>(kH) * kC * kK * kK);
    head.conv1_b_.assign(kH, 0.0);
    head.conv2_w_.resize(static_cast<std::size_t>(out_masks) * kH);
    head.conv2_b_.assign(out_masks, 0.0);

    SplitMix64 rng(derive_seed(SeedSpec{seed}, "toy_head.init"));
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(kC) * kK * kK);
    for (auto& w : head.conv1_w_) w = rng.next_double(-bound1, bound1);
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(kH));
    for (auto& w : head.conv2_w_) w = rng.next_double(-bound2, bound2);
    return head;
}

LogitStack ToyHead::forward(const RasterImage& img, bool stochastic, std::uint64_t seed) const {
    const int h = img.height(), w = img.width();
    const int pad = kK / 2;

    // Hidden activations a1[c](i,j) = tanh(conv1), optionally noise-masked.
    Stack hidden(kH, h, w);
    for (int c = 0; c < kH; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                double acc = conv1_b_[c];
                for (int ci = 0; ci < kC; ++ci)
                    for (int di = 0; di < kK; ++di) {
                        const int si = i + di - pad;
                        if (si < 0 || si >= h) continue;
                        for (int dj = 0; dj < kK; ++dj) {
                            const int sj = j + dj - pad;
                            if (sj < 0 || sj >= w) continue;
                            acc += conv1_w_[w1_index(c, ci, di, dj)] * img.at(si, sj, ci);
                        }
                    }
                hidden.at(c, i, j) = std::tanh(acc);
            }

    if (stochastic && noise_rate_ > 0.0) {
        SplitMix64 rng(derive_seed(SeedSpec{seed}, "toy_head.dropout"));
        for (auto& a : hidden.values())
            if (rng.next_bernoulli(noise_rate_)) a = 0.0;
    }

    LogitStack logits(out_masks_, h, w);
    for (int k = 0; k < out_masks_; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                double acc = conv2_b_[k];
                for (int c = 0; c < kH; ++c)
                    acc += conv2_w_[static_cast<std::size_t>(k) * kH + c] * hidden.at(c, i, j);
                logits.at(k, i, j) = acc;
            }
    return logits;
}

void ToyHead::ParamGrad::accumulate(const ParamGrad& other) {
    const auto add = [](std::vector<double>& dst, const std::vector<double>& src) {
        if (dst.empty()) {
            dst = src;
            return;
        }
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    };
    add(conv1_w, other.conv1_w);
    add(conv1_b, other.conv1_b);
    add(conv2_w, other.conv2_w);
    add(conv2_b, other.conv2_b);
}

void ToyHead::ParamGrad::scale(double factor) {
    for (auto* vec : {&conv1_w, &conv1_b, &conv2_w, &conv2_b})
        for (auto& v : *vec) v *= factor;
}

ToyHead::ParamGrad ToyHead::backward(const RasterImage& img, const Stack& logit_grad) const {
    const int h = img.height(), w = img.width();
    const int pad = kK / 2;
    if (logit_grad.count() != out_masks_ || logit_grad.height() != h || logit_grad.width() != w)
        throw InvalidInputError("ToyHead::backward: gradient shape mismatch");

    // Recompute the deterministic hidden state (pre- and post-activation).
    Stack pre(kH, h, w), act(kH, h, w);
    for (int c = 0; c < kH; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                double acc = conv1_b_[c];
                for (int ci = 0; ci < kC; ++ci)
                    for (int di = 0; di < kK; ++di) {
                        const int si = i + di - pad;
                        if (si < 0 || si >= h) continue;
                        for (int dj = 0; dj < kK; ++dj) {
                            const int sj = j + dj - pad;
                            if (sj < 0 || sj >= w) continue;
                            acc += conv1_w_[w1_index(c, ci, di, dj)] * img.at(si, sj, ci);
                        }
                    }
                pre.at(c, i, j) = acc;
                act.at(c, i, j) = std::tanh(acc);
            }

    ParamGrad grad;
    grad.conv1_w.assign(conv1_w_.size(), 0.0);
    grad.conv1_b.assign(conv1_b_.size(), 0.0);
    grad.conv2_w.assign(conv2_w_.size(), 0.0);
    grad.conv2_b.assign(conv2_b_.size(), 0.0);

    // 1x1 layer gradients plus the hidden-state gradient.
    Stack d_act(kH, h, w);
    for (int k = 0; k < out_masks_; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double g = logit_grad.at(k, i, j);
                grad.conv2_b[k] += g;
                for (int c = 0; c < kH; ++c) {
                    grad.conv2_w[static_cast<std::size_t>(k) * kH + c] += g * act.at(c, i, j);
                    d_act.at(c, i, j) += conv2_w_[static_cast<std::size_t>(k) * kH + c] * g;
                }
            }

    // Through tanh and the 3x3 convolution.
    for (int c = 0; c < kH; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double a = act.at(c, i, j);
                const double dz = d_act.at(c, i, j) * (1.0 - a * a);
                grad.conv1_b[c] += dz;
                for (int ci = 0; ci < kC; ++ci)
                    for (int di = 0; di < kK; ++di) {
                        const int si = i + di - pad;
                        if (si < 0 || si >= h) continue;
                        for (int dj = 0; dj < kK; ++dj) {
                            const int sj = j + dj - pad;
                            if (sj < 0 || sj >= w) continue;
                            grad.conv1_w[w1_index(c, ci, di, dj)] += dz * img.at(si, sj, ci);
                        }
                    }
            }
    return grad;
}

void ToyHead::apply_update(const ParamGrad& grad, double learning_rate) {
    const auto step = [learning_rate](std::vector<double>& params, const std::vector<double>& g) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * g[i];
    };
    step(conv1_w_, grad.conv1_w);
    step(conv1_b_, grad.conv1_b);
    step(conv2_w_, grad.conv2_w);
    step(conv2_b_, grad.conv2_b);
}

std::vector<double> ToyHead::flatten() const {
    std::vector<double> flat;
    flat.reserve(conv1_w_.size() + conv1_b_.size() + conv2_w_.size() + conv2_b_.size());
    for (const auto* vec : {&conv1_w_, &conv1_b_, &conv2_w_, &conv2_b_})
        flat.insert(flat.end(), vec->begin(), vec->end());
    return flat;
}

UncertaintyMap mc_forward(const ToyHead& head, const RasterImage& img, int k,
                          std::uint64_t seed) {
    if (k < 2) throw InvalidInputError("mc_forward: need k >= 2 passes");

    std::vector<ProbabilityStack> samples;
    samples.reserve(k);
    for (int s = 0; s < k; ++s) {
        const std::uint64_t pass_seed = derive_seed(SeedSpec{seed}, "mc." + std::to_string(s));
        samples.push_back(sigmoid_reduce(head.forward(img, true, pass_seed)));
    }
    return mc_uncertainty(samples);
}

} // namespace uaseg
