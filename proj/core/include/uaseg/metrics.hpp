#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uaseg/grid.hpp"

namespace uaseg {

// Pixel-count scores of one (prediction, ground truth) pair. The both_empty
// flag marks pairs where neither mask has any pixels; those are defined as
// iou = dice = 1.0 and kept auditable.
struct BinaryScore {
    std::int64_t intersection = 0;
    std::int64_t union_count = 0;
    std::int64_t pred_area = 0;
    std::int64_t gt_area = 0;
    double iou = 0.0;
    double dice = 0.0;
    bool both_empty = false;
};

// iou = (|p and g| + eps) / (|p or g| + eps),
// dice = (2|p and g| + eps) / (|p| + |g| + eps), integer pixel counts.
BinaryScore binary_iou_dice(const BinaryMask& pred, const BinaryMask& gt, double epsilon);

struct PairScore {
    std::string item_id;
    std::string class_name;
    double iou = 0.0;
    double dice = 0.0;
    bool both_empty = false;
};

struct MeanScore {
    double iou = 0.0;
    double dice = 0.0;
    std::size_t count = 0;
};

// Unweighted arithmetic means per class plus the mean over every score.
struct AggregateReport {
    std::map<std::string, MeanScore> per_class;
    MeanScore overall;
};

AggregateReport aggregate(std::span<const PairScore> scores);

struct ClassComparison {
    double a_iou = 0.0, b_iou = 0.0, iou_change_pct = 0.0;
    double a_dice = 0.0, b_dice = 0.0, dice_change_pct = 0.0;
};

// Percent change of model A over model B: 100 * (A/B - 1) per class, with
// the overall row the unweighted mean of the per-class changes.
struct ComparisonReport {
    std::map<std::string, ClassComparison> per_class;
    double mean_iou_change_pct = 0.0;
    double mean_dice_change_pct = 0.0;
};

ComparisonReport compare(const AggregateReport& a, const AggregateReport& b);

// CSV schema: item_id,class,iou,dice,flag. flag is "both_empty" or blank.
// The *_text forms render the exact bytes the writers emit, for callers
// that stage content-compared writes.
std::string pair_scores_csv_text(std::span<const PairScore> scores);
void write_pair_scores_csv(const std::filesystem::path& path,
                           std::span<const PairScore> scores);

std::string aggregate_json_text(const AggregateReport& report);
void write_aggregate_json(const std::filesystem::path& path, const AggregateReport& report);
AggregateReport load_aggregate_json(const std::filesystem::path& path);

std::string comparison_json_text(const ComparisonReport& report);
void write_comparison_json(const std::filesystem::path& path, const ComparisonReport& report);

} // namespace uaseg
