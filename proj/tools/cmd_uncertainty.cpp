#include <iostream>
#include <memory>

#include <json.hpp>

#include "cli_common.hpp"
#include "uaseg/loss.hpp"
#include "uaseg/png_io.hpp"

namespace fs = std::filesystem;
using namespace uaseg;

void register_cmd_uncertainty(CLI::App& app) {
    struct Options {
        std::string samples, out;
    };
    auto opts = std::make_shared<Options>();

    CLI::App* cmd = app.add_subcommand(
        "uncertainty",
        "Monte-Carlo uncertainty map from a directory of probability PNGs");
    cmd->add_option("--samples", opts->samples, "Directory of grayscale probability PNGs")
        ->required();
    cmd->add_option("--out", opts->out, "Output directory")->required();

    cmd->callback([opts] {
        const auto files = uaseg::cli::list_png_files(opts->samples);
        if (files.size() < 2)
            throw InvalidInputError("uncertainty: need >= 2 sample PNGs, found " +
                                    std::to_string(files.size()));

        std::vector<ProbabilityStack> samples;
        samples.reserve(files.size());
        for (const auto& file : files) {
            const Grid<double> gray = load_gray_png(file);
            ProbabilityStack stack(1, gray.height(), gray.width());
            stack.values() = gray.cells();
            if (!samples.empty() && !stack.same_shape(samples.front()))
                throw InvalidInputError("uncertainty: sample shapes differ at " +
                                        file.filename().string());
            samples.push_back(std::move(stack));
        }

        uaseg::cli::ensure_output_distinct(opts->samples, opts->out);
        const UncertaintyMap u_map = mc_uncertainty(samples);
        uaseg::cli::ensure_dir(opts->out);

        // 0.5 is the largest possible std of a [0,1] variable; map it to white.
        Grid<double> heat(u_map.height(), u_map.width());
        double lo = u_map.cells().front(), hi = lo, sum = 0.0;
        for (std::size_t i = 0; i < u_map.cells().size(); ++i) {
            const double u = u_map.cells()[i];
            heat.cells()[i] = u / 0.5;
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            sum += u;
        }
        uaseg::cli::write_png_if_changed(fs::path(opts->out) / "uncertainty.png",
                                         [&](const fs::path& p) { save_gray_png(p, heat); });

        nlohmann::json stats = {{"min", lo},
                                {"max", hi},
                                {"mean", sum / static_cast<double>(u_map.size())},
                                {"samples", files.size()}};
        uaseg::cli::write_file_if_changed(fs::path(opts->out) / "uncertainty.json",
                                          stats.dump(2) + "\n");
        std::cerr << "uncertainty: " << files.size() << " samples, mean "
                  << sum / static_cast<double>(u_map.size()) << "\n";
    });
}
