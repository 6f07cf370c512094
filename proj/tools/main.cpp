#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bioheat/config.hpp"
#include "bioheat/errors.hpp"
#include "bioheat/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"two-temperature bioheat toolkit: cell problems, homogenized "
                 "evolution, resolved reference runs, and the eps sweep"};
    app.require_subcommand(1);

    std::string config_path = "configs/default.toml";
    std::string out_dir;
    std::vector<std::string> flags;
    std::string macro_format = "csv";
    std::string micro_format = "binary";
    double epsilon = 0.0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")
            ->capture_default_str();
        sub->add_option("--out", out_dir, "output directory (overrides output.out_dir)");
        sub->add_option("--flag", flags, "key=value override, repeatable");
    };

    CLI::App* cell = app.add_subcommand("cell-report",
                                        "effective tensor, exchange coefficient, kernel");
    add_common(cell);

    CLI::App* macro = app.add_subcommand("macro-run", "homogenized evolution on the coarse grid");
    add_common(macro);
    macro->add_option("--format", macro_format, "trajectory format: csv or binary")
        ->capture_default_str();

    CLI::App* micro = app.add_subcommand("micro-run", "resolved two-phase evolution");
    add_common(micro);
    micro->add_option("--format", micro_format, "trajectory format: csv or binary")
        ->capture_default_str();
    micro->add_option("--epsilon", epsilon,
                      "cell period 1/K; defaults to the coarsest study entry");

    CLI::App* study = app.add_subcommand("study",
                                         "eps sweep comparing resolved and homogenized runs");
    add_common(study);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        bioheat::RunConfig cfg = bioheat::load_config(config_path, flags);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (cell->parsed())
            bioheat::drive_cell_report(cfg);
        else if (macro->parsed())
            bioheat::drive_macro_run(cfg, macro_format);
        else if (micro->parsed())
            bioheat::drive_micro_run(cfg, epsilon, micro_format);
        else if (study->parsed())
            bioheat::drive_study(cfg);
    } catch (const bioheat::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const bioheat::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
