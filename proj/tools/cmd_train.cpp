#include <iostream>
#include <memory>

#include "cli_common.hpp"
#include "uaseg/loss.hpp"
#include "uaseg/rng.hpp"
#include "uaseg/sigmoid.hpp"
#include "uaseg/trainer.hpp"

namespace fs = std::filesystem;
using namespace uaseg;

void register_cmd_train_toy(CLI::App& app) {
    struct Options {
        int steps = 200;
        double lr = 0.3;
        std::optional<double> alpha, beta, epsilon;
        std::optional<int> mc_samples;
        double noise_rate = 0.2;
        std::optional<std::uint64_t> seed;
        std::string out;
        std::string task = "disc";
        int size = 32;
        int items = 1;
        int log_every = 10;
        bool no_uncertainty = false;
        std::string config;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd = app.add_subcommand(
        "train-toy", "Train the toy segmentation head on a synthetic task");
    cmd->add_option("--steps", opts->steps, "Gradient steps (default 200)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lr", opts->lr, "Learning rate (default 0.3)");
    cmd->add_option("--alpha", opts->alpha, "BCE/IoU mix in [0,1]");
    cmd->add_option("--beta", opts->beta, "Uncertainty regularizer weight");
    cmd->add_option("--epsilon", opts->epsilon, "IoU stability constant");
    cmd->add_option("--mc-samples", opts->mc_samples, "Stochastic passes per step");
    cmd->add_option("--noise-rate", opts->noise_rate,
                    "Hidden-activation dropout rate in [0,1) (default 0.2)");
    cmd->add_option("--seed", opts->seed, "Master seed");
    cmd->add_option("--out", opts->out, "Output directory")->required();
    cmd->add_option("--task", opts->task, "disc|two-class (default disc)")
        ->check(CLI::IsMember({"disc", "two-class"}));
    cmd->add_option("--size", opts->size, "Synthetic image side length (default 32)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--items", opts->items, "Synthetic samples in the dataset (default 1)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--log-every", opts->log_every, "Progress cadence (default 10)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-uncertainty", opts->no_uncertainty,
                  "Train on the plain BCE/IoU mix without MC passes");
    cmd->add_option("--config", opts->config,
                    "Loss config JSON (alpha, beta, epsilon, mc_samples); flags win");

    cmd->callback([opts] {
        TrainConfig cfg;
        if (!opts->config.empty()) cfg.loss = load_loss_config(opts->config);
        if (opts->alpha) cfg.loss.alpha = *opts->alpha;
        if (opts->beta) cfg.loss.beta = *opts->beta;
        if (opts->epsilon) cfg.loss.epsilon = *opts->epsilon;
        if (opts->mc_samples) cfg.loss.mc_samples = *opts->mc_samples;
        cfg.steps = opts->steps;
        cfg.learning_rate = opts->lr;
        cfg.seed = uaseg::cli::resolve_seed(opts->seed);
        cfg.log_every = opts->log_every;
        cfg.use_uncertainty = !opts->no_uncertainty;
        cfg.validate();

        std::vector<TrainSample> dataset;
        for (int i = 0; i < opts->items; ++i) {
            const std::uint64_t item_seed =
                derive_seed(SeedSpec{cfg.seed}, "dataset." + std::to_string(i));
            dataset.push_back(opts->task == "disc"
                                  ? make_disc_sample(opts->size, opts->size, item_seed)
                                  : make_two_class_sample(opts->size, opts->size, item_seed));
        }

        const int out_masks = static_cast<int>(dataset.front().masks.size());
        ToyHead head = ToyHead::init(out_masks, opts->noise_rate,
                                     derive_seed(SeedSpec{cfg.seed}, "head"));

        TrainResult result = train(std::move(head), dataset, cfg);
        for (const auto& row : result.trace)
            if (row.step % cfg.log_every == 0 || row.step == cfg.steps - 1)
                std::cerr << "step " << row.step << " total " << row.loss.total << "\n";

        uaseg::cli::ensure_dir(opts->out);
        write_trace_csv(fs::path(opts->out) / "trace.csv", result.trace);
        write_head_params(opts->out, result.head);

        // Mean soft IoU of the deterministic forward over the dataset.
        double iou_sum = 0.0;
        for (const auto& sample : dataset) {
            const auto probs = sigmoid_reduce(result.head.forward(sample.image, false));
            iou_sum += soft_iou(probs, sample.masks, cfg.loss.epsilon).iou;
        }
        std::cerr << "train-toy: final mean soft IoU "
                  << iou_sum / static_cast<double>(dataset.size()) << "\n";
    });
}
