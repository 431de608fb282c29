// Command-line front end. Exit codes: 0 pass, 1 usage or I/O error,
// 2 antipodal obstacle pair, 3 separation fit failure, 4 certification or
// geometry failure (the report is still written when one was requested).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gaussmiss/cli.hpp"

using namespace gaussmiss;

int main(int argc, char** argv) {
    CLI::App app{"Build tori whose Gauss map avoids a finite set of points on S^2, and certify them."};
    app.set_config("--config", "", "Config file (TOML/INI keys mirroring the long flags); flags win");
    app.require_subcommand(1);
    app.footer("Exit codes: 0 pass, 1 usage/I/O, 2 antipodal pair, 3 fit failure, 4 certification failure.");

    RunConfig cfg;
    std::string grid_text = "1024x1024";
    std::string export_grid_text = "256x256";
    std::string series_text;
    double epsilon = 0.0;
    double delta = 0.0;
    unsigned threads = 0;
    std::optional<double> arc;

    app.add_option("--points", cfg.points_path, "Obstacle file; default is the canonical tetrahedron")
        ->check(CLI::ExistingFile);
    auto* eps_opt = app.add_option("--epsilon", epsilon, "Tube scale; omit together with --delta to auto-tune");
    auto* delta_opt = app.add_option("--delta", delta, "Figure-eight parameter, in (0, 1]");
    app.add_option("--grid", grid_text, "Verification grid NxM")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for pole sampling")->capture_default_str();
    app.add_option("--margin", cfg.margin_target, "Separation margin target (tanlat units)")
        ->capture_default_str();
    app.add_option("--max-degree", cfg.max_degree, "Largest odd harmonic in the fit")->capture_default_str();
    app.add_option("--target-radius", cfg.target_radius, "Certified radius auto-tune must reach")
        ->capture_default_str();
    app.add_option("--series", series_text, "Height function override, terms k:a:b (z = sum a cos k + b sin k)");
    app.add_option("--report", cfg.report_path, "JSON report path; stdout when omitted");
    app.add_option("--mesh", cfg.mesh_path, "OBJ output path");
    app.add_option("--gauss-cloud", cfg.cloud_path, "PLY output path for Gauss map samples and obstacles");
    app.add_option("--export-grid", export_grid_text, "Sampling grid for --mesh and --gauss-cloud")
        ->capture_default_str();
    app.add_option("--threads", threads, "Worker threads for grid passes, 0 = all cores")->capture_default_str();

    auto* construct = app.add_subcommand("construct", "Fit, tune and verify; write the requested artifacts");
    auto* verify = app.add_subcommand("verify", "Fit and verify; write the report");
    auto* export_mesh = app.add_subcommand("export-mesh", "Like construct, but --mesh is required and written even on failure");
    auto* spin_cmd = app.add_subcommand("spin", "Spin a profile described in an expression file and check it");
    spin_cmd->add_option("program", cfg.spin_path, "Expression file")->required()->check(CLI::ExistingFile);
    auto* fig = app.add_subcommand("figure-eight-info", "Spherical image data of the figure-eight curve");
    fig->add_option("--arc", arc, "Also report the largest delta whose image fits in pi + arc");
    for (auto* sub : {construct, verify, export_mesh, spin_cmd, fig}) sub->fallthrough();

    try {
        app.parse(argc, argv);
        cfg.grid = parse_grid(grid_text);
        cfg.export_grid = parse_grid(export_grid_text);
        if (!series_text.empty()) cfg.series = parse_series(series_text);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code::io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::io;
    }
    if (eps_opt->count() > 0) cfg.epsilon = epsilon;
    if (delta_opt->count() > 0) cfg.delta = delta;
    set_grid_threads(threads);

    try {
        if (fig->parsed()) return run_figure_eight_info(cfg.delta.value_or(0.125), arc, std::cout);
        if (spin_cmd->parsed()) {
            cfg.command = Command::spin;
            return run_spin(cfg, std::cerr, std::cout);
        }
        cfg.command = verify->parsed()        ? Command::verify
                      : export_mesh->parsed() ? Command::export_mesh
                                              : Command::construct;
        if (cfg.command == Command::verify) {
            cfg.mesh_path.clear();
            cfg.cloud_path.clear();
        }
        return run_construct(cfg, std::cerr, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::io;
    }
}
