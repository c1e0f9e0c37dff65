#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "uaseg/mask_ops.hpp"
#include "uaseg/metrics.hpp"
#include "uaseg/png_io.hpp"

namespace fs = std::filesystem;
using namespace uaseg;

namespace uaseg::cli::stages {

void run_eval(const EvalOptions& opts) {
    ensure_output_distinct(opts.pred_dir, opts.out_dir);
    ensure_output_distinct(opts.gt_dir, opts.out_dir);
    const Palette palette = load_palette_csv(opts.palette_path);
    const auto pred_files = list_png_files(opts.pred_dir);
    if (pred_files.empty()) throw IoError("no PNG files in " + opts.pred_dir.string());

    std::vector<fs::path> pairs;
    for (const auto& pred : pred_files)
        if (fs::exists(opts.gt_dir / pred.filename())) pairs.push_back(pred);
    if (pairs.empty())
        throw IoError("no prediction in " + opts.pred_dir.string() +
                      " has a ground-truth partner in " + opts.gt_dir.string());
    ensure_dir(opts.out_dir);

    // Scores land in a fixed (file, class) layout so output bytes do not
    // depend on worker scheduling.
    std::vector<PairScore> scores(pairs.size() * palette.size());
    parallel_for(pairs.size(), opts.jobs, [&](std::size_t idx) {
        const fs::path& pred_path = pairs[idx];
        const LabelRaster pred = load_label_png(pred_path);
        const LabelRaster gt = load_label_png(opts.gt_dir / pred_path.filename());
        if (!pred.same_shape(gt))
            throw InvalidInputError("eval: dimensions differ for " +
                                    pred_path.filename().string());

        const auto pred_masks = split_by_color(pred, palette);
        const auto gt_masks = split_by_color(gt, palette);
        for (std::size_t k = 0; k < palette.size(); ++k) {
            const BinaryScore s = binary_iou_dice(pred_masks[k], gt_masks[k], opts.epsilon);
            scores[idx * palette.size() + k] =
                PairScore{pred_path.stem().string(), palette.entry(k).name, s.iou, s.dice,
                          s.both_empty};
        }
    });

    write_file_if_changed(opts.out_dir / "pairs.csv", pair_scores_csv_text(scores));

    // Classes absent from both rasters carry no evidence; they stay in the
    // CSV flagged both_empty but are excluded from the means.
    std::vector<PairScore> informative;
    for (const auto& s : scores)
        if (!s.both_empty) informative.push_back(s);
    if (informative.empty())
        throw InvalidInputError("eval: every (item,class) pair is empty in both rasters");
    write_file_if_changed(opts.out_dir / "aggregate.json",
                          aggregate_json_text(aggregate(informative)));

    std::cerr << "eval: scored " << pairs.size() << " pair(s), " << informative.size()
              << " informative (item,class) score(s)\n";
}

} // namespace uaseg::cli::stages

void register_cmd_eval(CLI::App& app) {
    struct Options {
        std::string pred, gt, palette, out;
        double epsilon = 1e-6;
        int jobs = 1;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd =
        app.add_subcommand("eval", "Score predicted label rasters against ground truth");
    cmd->add_option("--pred", opts->pred, "Directory of predicted label PNGs")->required();
    cmd->add_option("--gt", opts->gt, "Directory of ground-truth label PNGs")->required();
    cmd->add_option("--palette", opts->palette, "Palette CSV")->required();
    cmd->add_option("--out", opts->out, "Output directory for pairs.csv / aggregate.json")
        ->required();
    cmd->add_option("--epsilon", opts->epsilon, "Metric stability constant (default 1e-6)");
    cmd->add_option("--jobs", opts->jobs, "Parallel workers")->check(CLI::PositiveNumber);

    cmd->callback([opts] {
        uaseg::cli::stages::EvalOptions stage;
        stage.pred_dir = opts->pred;
        stage.gt_dir = opts->gt;
        stage.palette_path = opts->palette;
        stage.out_dir = opts->out;
        stage.epsilon = opts->epsilon;
        stage.jobs = opts->jobs;
        uaseg::cli::stages::run_eval(stage);
    });
}

void register_cmd_compare(CLI::App& app) {
    struct Options {
        std::string a, b, out;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd = app.add_subcommand(
        "compare", "Percent change of aggregate A over baseline aggregate B");
    cmd->add_option("--a", opts->a, "Aggregate JSON for model A")->required();
    cmd->add_option("--b", opts->b, "Aggregate JSON for baseline model B")->required();
    cmd->add_option("--out", opts->out, "Output comparison JSON")->required();

    cmd->callback([opts] {
        const ComparisonReport report =
            compare(load_aggregate_json(opts->a), load_aggregate_json(opts->b));
        write_comparison_json(opts->out, report);
        std::cerr << "compare: mean IoU change " << report.mean_iou_change_pct
                  << "%, mean Dice change " << report.mean_dice_change_pct << "%\n";
    });
}
