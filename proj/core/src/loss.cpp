#include "uaseg/loss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "uaseg/sigmoid.hpp"

namespace uaseg {
namespace {

void check_target_shape(const Stack& stack, std::span<const BinaryMask> target,
                        const char* op) {
    if (static_cast<int>(target.size()) != stack.count())
        throw InvalidInputError(std::string(op) + ": stack has " +
                                std::to_string(stack.count()) + " masks but target has " +
                                std::to_string(target.size()));
    for (const auto& mask : target)
        if (mask.height() != stack.height() || mask.width() != stack.width())
            throw InvalidInputError(std::string(op) + ": target mask dimensions differ");
}

// Stable elementwise BCE with logits: max(x,0) - x*y + log1p(exp(-|x|)).
double bce_element(double x, double y) {
    return std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::fabs(x)));
}

} // namespace

void LossConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidParameterError("loss config: alpha must lie in [0,1]");
    if (!(beta >= 0.0)) throw InvalidParameterError("loss config: beta must be >= 0");
    if (!(epsilon > 0.0)) throw InvalidParameterError("loss config: epsilon must be > 0");
    if (mc_samples < 2) throw InvalidParameterError("loss config: mc_samples must be >= 2");
}

LossConfig load_loss_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open loss config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad JSON in " + path.string() + ": " + e.what());
    }
    LossConfig cfg;
    try {
        cfg.alpha = j.value("alpha", cfg.alpha);
        cfg.beta = j.value("beta", cfg.beta);
        cfg.epsilon = j.value("epsilon", cfg.epsilon);
        cfg.mc_samples = j.value("mc_samples", cfg.mc_samples);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad loss config " + path.string() + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

BceResult bce(const LogitStack& logits, std::span<const BinaryMask> target) {
    check_target_shape(logits, target, "bce");

    const int n = logits.count(), h = logits.height(), w = logits.width();
    const double inv_count = 1.0 / (static_cast<double>(n) * h * w);

    BceResult res;
    res.grad = Stack(n, h, w);
    double sum = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double x = logits.at(k, i, j);
                const double y = target[k].at(i, j);
                sum += bce_element(x, y);
                res.grad.at(k, i, j) = (sigmoid(x) - y) * inv_count;
            }
    res.value = sum * inv_count;
    return res;
}

SoftIouResult soft_iou(const ProbabilityStack& probs, std::span<const BinaryMask> target,
                       double epsilon) {
    check_target_shape(probs, target, "soft_iou");

    const int n = probs.count(), h = probs.height(), w = probs.width();
    double inter = 0.0, prob_sum = 0.0, target_sum = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double p = probs.at(k, i, j);
                const double y = target[k].at(i, j);
                inter += p * y;
                prob_sum += p;
                target_sum += y;
            }

    const double union_sum = prob_sum + target_sum - inter;
    const double denom = union_sum + epsilon;

    SoftIouResult res;
    res.iou = (inter + epsilon) / denom;
    res.loss = 1.0 - res.iou;
    res.grad = Stack(n, h, w);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double y = target[k].at(i, j);
                // d iou / dp = (y*denom - (inter+eps)*(1-y)) / denom^2
                res.grad.at(k, i, j) =
                    -(y * denom - (inter + epsilon) * (1.0 - y)) / (denom * denom);
            }
    return res;
}

DiceResult dice_loss(const ProbabilityStack& probs, std::span<const BinaryMask> target,
                     double epsilon) {
    check_target_shape(probs, target, "dice_loss");

    const int n = probs.count(), h = probs.height(), w = probs.width();
    double inter = 0.0, prob_sum = 0.0, target_sum = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double p = probs.at(k, i, j);
                const double y = target[k].at(i, j);
                inter += p * y;
                prob_sum += p;
                target_sum += y;
            }

    const double denom = prob_sum + target_sum + epsilon;

    DiceResult res;
    res.loss = 1.0 - (2.0 * inter + epsilon) / denom;
    res.grad = Stack(n, h, w);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double y = target[k].at(i, j);
                // d dice / dp = (2y*denom - (2*inter+eps)) / denom^2
                res.grad.at(k, i, j) =
                    -(2.0 * y * denom - (2.0 * inter + epsilon)) / (denom * denom);
            }
    return res;
}

UncertaintyMap mc_uncertainty(std::span<const ProbabilityStack> samples) {
    if (samples.size() < 2)
        throw InvalidInputError("mc_uncertainty: need >= 2 samples, got " +
                                std::to_string(samples.size()));
    for (const auto& s : samples)
        if (!s.same_shape(samples[0]))
            throw InvalidInputError("mc_uncertainty: sample shapes differ");

    const int n = samples[0].count(), h = samples[0].height(), w = samples[0].width();
    const std::size_t m = samples.size();
    std::vector<double> shifted(m);

    UncertaintyMap u_map(h, w, 0.0);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double std_sum = 0.0;
            for (int k = 0; k < n; ++k) {
                double lo = samples[0].at(k, i, j);
                for (std::size_t s = 1; s < m; ++s) lo = std::min(lo, samples[s].at(k, i, j));
                for (std::size_t s = 0; s < m; ++s) shifted[s] = samples[s].at(k, i, j) - lo;
                std::sort(shifted.begin(), shifted.end());

                double mean = 0.0;
                for (double v : shifted) mean += v;
                mean /= static_cast<double>(m);
                double var = 0.0;
                for (double v : shifted) var += (v - mean) * (v - mean);
                var /= static_cast<double>(m);
                std_sum += std::sqrt(var);
            }
            u_map.at(i, j) = std_sum / n;
        }
    return u_map;
}

CombinedResult combined_loss(const LogitStack& logits, std::span<const BinaryMask> target,
                             const UncertaintyMap& u_map, const LossConfig& cfg) {
    cfg.validate();
    check_target_shape(logits, target, "combined_loss");
    if (u_map.height() != logits.height() || u_map.width() != logits.width())
        throw InvalidInputError("combined_loss: uncertainty map dimensions differ");
    for (double u : u_map.cells()) {
        if (!std::isfinite(u)) throw NumericError("combined_loss: non-finite uncertainty");
        if (u < 0.0) throw InvalidInputError("combined_loss: negative uncertainty");
    }

    const int n = logits.count(), h = logits.height(), w = logits.width();
    const double inv_pixels = 1.0 / (static_cast<double>(h) * w);
    const double inv_masks = 1.0 / n;

    // Pass 1: probabilities, per-pixel BCE means, global IoU sums.
    Stack probs(n, h, w);
    Grid<double> bce_pix(h, w, 0.0);
    double inter = 0.0, prob_sum = 0.0, target_sum = 0.0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double x = logits.at(k, i, j);
                const double y = target[k].at(i, j);
                const double p = sigmoid(x);
                probs.at(k, i, j) = p;
                bce_pix.at(i, j) += bce_element(x, y) * inv_masks;
                inter += p * y;
                prob_sum += p;
                target_sum += y;
            }

    const double denom = prob_sum + target_sum - inter + cfg.epsilon;
    const double iou = (inter + cfg.epsilon) / denom;
    const double iou_loss = 1.0 - iou;

    // Pass 2: per-pixel mix, uncertainty weighting, scalar reductions.
    double bce_sum = 0.0, c_sum = 0.0, w_sum = 0.0, u_sum = 0.0, weight_sum = 0.0;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double c_pix = cfg.alpha * bce_pix.at(i, j) + (1.0 - cfg.alpha) * iou_loss;
            const double weight = std::exp(-u_map.at(i, j));
            bce_sum += bce_pix.at(i, j);
            c_sum += c_pix;
            w_sum += c_pix * weight;
            u_sum += u_map.at(i, j);
            weight_sum += weight;
        }

    CombinedResult res;
    res.breakdown.bce = bce_sum * inv_pixels;
    res.breakdown.iou_loss = iou_loss;
    res.breakdown.c = c_sum * inv_pixels;
    res.breakdown.w_mean = w_sum * inv_pixels;
    res.breakdown.r = cfg.beta * (u_sum * inv_pixels);
    res.breakdown.total = res.breakdown.w_mean + res.breakdown.r;
    if (!std::isfinite(res.breakdown.total))
        throw NumericError("combined_loss: non-finite total");

    // Pass 3: gradient w.r.t. logits. The scalar IoU-loss term is broadcast
    // to every pixel, so its gradient is scaled by the mean weight.
    const double mean_weight = weight_sum * inv_pixels;
    const double bce_coeff = cfg.alpha * inv_pixels * inv_masks;
    const double iou_coeff = (1.0 - cfg.alpha) * mean_weight;
    res.grad = Stack(n, h, w);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) {
                const double p = probs.at(k, i, j);
                const double y = target[k].at(i, j);
                const double weight = std::exp(-u_map.at(i, j));
                const double d_iou_loss_dp =
                    -(y * denom - (inter + cfg.epsilon) * (1.0 - y)) / (denom * denom);
                res.grad.at(k, i, j) = bce_coeff * weight * (p - y) +
                                       iou_coeff * d_iou_loss_dp * p * (1.0 - p);
            }
    return res;
}

} // namespace uaseg
