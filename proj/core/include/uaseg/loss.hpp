#pragma once

#include <filesystem>
#include <span>

#include "uaseg/grid.hpp"

namespace uaseg {

// Knobs of the composite objective. alpha mixes BCE against the soft-IoU
// loss, beta weights the uncertainty regularizer, epsilon stabilizes the
// IoU/Dice ratios, mc_samples is the number of stochastic passes feeding
// the uncertainty map.
struct LossConfig {
    double alpha = 0.5;
    double beta = 0.1;
    double epsilon = 1e-6;
    int mc_samples = 10;

    void validate() const;
};

// JSON file with any subset of the keys alpha, beta, epsilon, mc_samples;
// missing keys keep their defaults. The result is validated.
LossConfig load_loss_config(const std::filesystem::path& path);

// Scalar pieces of one combined-loss evaluation. total == w_mean + r as
// computed; with U identically zero, w_mean == c and r == 0 bit-for-bit.
struct LossBreakdown {
    double bce = 0.0;
    double iou_loss = 0.0;
    double c = 0.0;
    double w_mean = 0.0;
    double r = 0.0;
    double total = 0.0;
};

struct BceResult {
    double value = 0.0;
    Stack grad; // d value / d logits
};

struct SoftIouResult {
    double iou = 0.0;
    double loss = 0.0; // 1 - iou
    Stack grad;        // d loss / d probs
};

struct DiceResult {
    double loss = 0.0;
    Stack grad; // d loss / d probs
};

struct CombinedResult {
    LossBreakdown breakdown;
    Stack grad; // d total / d logits; U is treated as a constant
};

// Mean binary cross-entropy over all (mask,pixel) elements, computed in the
// log-sum-exp form so no finite logit produces NaN or Inf.
// gradient = (sigmoid(x) - y) / N elementwise.
BceResult bce(const LogitStack& logits, std::span<const BinaryMask> target);

// Soft IoU over global sums: iou = (sum(p*y)+eps) / (sum p + sum y - sum(p*y) + eps),
// loss = 1 - iou, with the analytic quotient-rule gradient.
SoftIouResult soft_iou(const ProbabilityStack& probs, std::span<const BinaryMask> target,
                       double epsilon);

// Dice loss 1 - (2*sum(p*y)+eps) / (sum p + sum y + eps).
DiceResult dice_loss(const ProbabilityStack& probs, std::span<const BinaryMask> target,
                     double epsilon);

// Per-pixel population standard deviation of the sampled probabilities,
// computed per mask channel and averaged over channels. Samples are shifted
// by their per-pixel minimum and accumulated in sorted order, so the result
// is independent of sample ordering and exactly zero when samples agree.
// Requires >= 2 samples of identical shape.
UncertaintyMap mc_uncertainty(std::span<const ProbabilityStack> samples);

// The combined objective:
//   C(i,j)  = alpha * mean_k BCE_elem(k,i,j) + (1-alpha) * iou_loss
//   W(i,j)  = C(i,j) * exp(-U(i,j))
//   total   = mean(W) + beta * mean(U)
// U carries no gradient; the returned gradient is with respect to logits.
CombinedResult combined_loss(const LogitStack& logits, std::span<const BinaryMask> target,
                             const UncertaintyMap& u_map, const LossConfig& cfg);

} // namespace uaseg
