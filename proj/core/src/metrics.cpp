#include "uaseg/metrics.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace uaseg {
namespace {

// Fixed shortest-round-trip formatting so emitted files are byte-stable.
std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

BinaryScore binary_iou_dice(const BinaryMask& pred, const BinaryMask& gt, double epsilon) {
    if (!pred.same_shape(gt))
        throw InvalidInputError("binary_iou_dice: mask dimensions differ");

    BinaryScore s;
    const auto& p = pred.cells();
    const auto& g = gt.cells();
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
        const bool pp = p[idx] != 0;
        const bool gg = g[idx] != 0;
        s.intersection += pp && gg;
        s.union_count += pp || gg;
        s.pred_area += pp;
        s.gt_area += gg;
    }

    if (s.union_count == 0) {
        s.iou = 1.0;
        s.dice = 1.0;
        s.both_empty = true;
        return s;
    }
    s.iou = (static_cast<double>(s.intersection) + epsilon) /
            (static_cast<double>(s.union_count) + epsilon);
    s.dice = (2.0 * static_cast<double>(s.intersection) + epsilon) /
             (static_cast<double>(s.pred_area) + static_cast<double>(s.gt_area) + epsilon);
    return s;
}

AggregateReport aggregate(std::span<const PairScore> scores) {
    if (scores.empty()) throw InvalidInputError("aggregate: empty score list");

    AggregateReport report;
    for (const auto& s : scores) {
        auto& cls = report.per_class[s.class_name];
        cls.iou += s.iou;
        cls.dice += s.dice;
        cls.count += 1;
        report.overall.iou += s.iou;
        report.overall.dice += s.dice;
        report.overall.count += 1;
    }
    for (auto& [name, cls] : report.per_class) {
        cls.iou /= static_cast<double>(cls.count);
        cls.dice /= static_cast<double>(cls.count);
    }
    report.overall.iou /= static_cast<double>(report.overall.count);
    report.overall.dice /= static_cast<double>(report.overall.count);
    return report;
}

ComparisonReport compare(const AggregateReport& a, const AggregateReport& b) {
    if (a.per_class.size() != b.per_class.size())
        throw InvalidInputError("compare: class sets differ in size");
    for (const auto& [name, unused] : a.per_class)
        if (!b.per_class.contains(name))
            throw InvalidInputError("compare: class '" + name + "' missing from model B");

    const auto pct_change = [](double va, double vb, const std::string& what) {
        if (!(vb > 0.0))
            throw InvalidInputError("compare: baseline mean for " + what +
                                    " must be > 0 to form a percent change");
        return 100.0 * (va / vb - 1.0);
    };

    ComparisonReport report;
    double iou_sum = 0.0, dice_sum = 0.0;
    for (const auto& [name, ca] : a.per_class) {
        const auto& cb = b.per_class.at(name);
        ClassComparison cmp;
        cmp.a_iou = ca.iou;
        cmp.b_iou = cb.iou;
        cmp.iou_change_pct = pct_change(ca.iou, cb.iou, name + " iou");
        cmp.a_dice = ca.dice;
        cmp.b_dice = cb.dice;
        cmp.dice_change_pct = pct_change(ca.dice, cb.dice, name + " dice");
        iou_sum += cmp.iou_change_pct;
        dice_sum += cmp.dice_change_pct;
        report.per_class.emplace(name, cmp);
    }
    report.mean_iou_change_pct = iou_sum / static_cast<double>(report.per_class.size());
    report.mean_dice_change_pct = dice_sum / static_cast<double>(report.per_class.size());
    return report;
}

std::string pair_scores_csv_text(std::span<const PairScore> scores) {
    std::string out = "item_id,class,iou,dice,flag\n";
    for (const auto& s : scores) {
        out += s.item_id;
        out += ',';
        out += s.class_name;
        out += ',';
        out += format_double(s.iou);
        out += ',';
        out += format_double(s.dice);
        out += ',';
        out += s.both_empty ? "both_empty" : "";
        out += '\n';
    }
    return out;
}

void write_pair_scores_csv(const std::filesystem::path& path,
                           std::span<const PairScore> scores) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << pair_scores_csv_text(scores);
}

std::string aggregate_json_text(const AggregateReport& report) {
    nlohmann::json j;
    for (const auto& [name, cls] : report.per_class)
        j["per_class"][name] = {{"iou", cls.iou}, {"dice", cls.dice}, {"count", cls.count}};
    j["overall"] = {{"iou", report.overall.iou},
                    {"dice", report.overall.dice},
                    {"count", report.overall.count}};
    return j.dump(2) + "\n";
}

void write_aggregate_json(const std::filesystem::path& path, const AggregateReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << aggregate_json_text(report);
}

AggregateReport load_aggregate_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open aggregate JSON " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad JSON in " + path.string() + ": " + e.what());
    }

    AggregateReport report;
    try {
        for (const auto& [name, cls] : j.at("per_class").items())
            report.per_class[name] = MeanScore{cls.at("iou").get<double>(),
                                               cls.at("dice").get<double>(),
                                               cls.value("count", std::size_t{0})};
        const auto& overall = j.at("overall");
        report.overall = MeanScore{overall.at("iou").get<double>(),
                                   overall.at("dice").get<double>(),
                                   overall.value("count", std::size_t{0})};
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad aggregate JSON " + path.string() + ": " + e.what());
    }
    return report;
}

std::string comparison_json_text(const ComparisonReport& report) {
    nlohmann::json j;
    for (const auto& [name, cmp] : report.per_class)
        j["per_class"][name] = {{"a_iou", cmp.a_iou},
                                {"b_iou", cmp.b_iou},
                                {"iou_change_pct", cmp.iou_change_pct},
                                {"a_dice", cmp.a_dice},
                                {"b_dice", cmp.b_dice},
                                {"dice_change_pct", cmp.dice_change_pct}};
    j["mean_iou_change_pct"] = report.mean_iou_change_pct;
    j["mean_dice_change_pct"] = report.mean_dice_change_pct;
    return j.dump(2) + "\n";
}

void write_comparison_json(const std::filesystem::path& path, const ComparisonReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << comparison_json_text(report);
}

} // namespace uaseg
