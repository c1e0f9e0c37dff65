#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "uaseg/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"uaseg: uncertainty-aware segmentation training toolkit"};
    app.require_subcommand(1);

    register_cmd_weather(app);
    register_cmd_deform(app);
    register_cmd_palette_split(app);
    register_cmd_crop_instances(app);
    register_cmd_eval(app);
    register_cmd_compare(app);
    register_cmd_uncertainty(app);
    register_cmd_train_toy(app);
    register_cmd_pipeline(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e); // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const uaseg::InvalidParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
