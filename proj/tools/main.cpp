#include "invsrc/exporters.hpp"
#include "invsrc/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace {

void print_report(const invsrc::RunReport& report) {
    std::printf("run: %s\n", report.kind.c_str());
    for (const auto& [name, value] : report.scalars) {
        std::printf("  %-24s %.6e\n", name.c_str(), value);
    }
    if (!report.table1.empty()) {
        std::printf("  %4s  %-12s %-12s\n", "J", "eps_f1", "eps_f2");
        for (const auto& row : report.table1) {
            std::printf("  %4d  %-12.4e %-12.4e\n", row.J, row.eps_f1, row.eps_f2);
        }
    }
    for (const auto& [stage, ms] : report.timings_ms) {
        std::printf("  time %-19s %.1f ms\n", stage.c_str(), ms);
    }
    std::printf("  output: %s\n", report.config.output_dir.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-frequency inverse source toolkit for the radial "
                 "Helmholtz equation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool allow_inverse_crime = false;
    app.add_option("--config", config_path, "configuration file (key = value)");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--seed", seed, "RNG seed for synthetic noise")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_flag("--allow-inverse-crime", allow_inverse_crime,
                 "permit grid.n_data == grid.n_inverse");

    auto* cmd_forward =
        app.add_subcommand("forward", "simulate boundary data at every frequency");
    auto* cmd_adjoint =
        app.add_subcommand("adjoint", "solve adjoint problems with unit datum");
    auto* cmd_reconstruct = app.add_subcommand(
        "reconstruct", "minimum-norm reconstruction from synthetic data");
    auto* cmd_table1 = app.add_subcommand(
        "table1", "error table over J = 10..60 for both canonical sources");
    auto* cmd_eigen = app.add_subcommand(
        "eigen", "eigenfunction-expansion reconstruction at k_j = sqrt(lambda_j)");
    auto* cmd_nonrad = app.add_subcommand(
        "nonrad", "non-radiating source demo (frequencies k1, k2, k3)");
    for (auto* cmd : app.get_subcommands({})) {
        cmd->fallthrough(); // global flags may follow the subcommand
    }

    CLI11_PARSE(app, argc, argv);

    try {
        invsrc::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = invsrc::load_config(config_path, allow_inverse_crime);
        } else {
            cfg.allow_inverse_crime = allow_inverse_crime;
            cfg.frequencies = invsrc::parse_frequencies("1..40");
            if (cmd_nonrad->parsed()) {
                cfg.frequencies = {1.0, 2.0, 3.0};
            }
        }
        if (seed_given) {
            cfg.seed = seed;
        }
        if (!out_dir.empty()) {
            cfg.output_dir = out_dir;
        }
        cfg.validate();

        invsrc::RunReport report;
        if (cmd_forward->parsed()) {
            report = invsrc::run_forward(cfg);
        } else if (cmd_adjoint->parsed()) {
            report = invsrc::run_adjoint(cfg);
        } else if (cmd_reconstruct->parsed()) {
            report = invsrc::run_reconstruction(cfg);
        } else if (cmd_table1->parsed()) {
            report = invsrc::run_table1(cfg);
        } else if (cmd_eigen->parsed()) {
            report = invsrc::run_eigen_experiment(cfg);
        } else if (cmd_nonrad->parsed()) {
            report = invsrc::run_nonradiating_demo(cfg);
        }

        invsrc::export_csv(report, report.config.output_dir);
        invsrc::export_json(report, report.config.output_dir);
        invsrc::export_plot(report, report.config.output_dir);
        print_report(report);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
