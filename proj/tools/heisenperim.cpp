// heisenperim: perimeter measures and isoperimetric reports for surfaces in
// the Heisenberg group under convex-body Carnot-Caratheodory metrics.

#include <CLI11.hpp>

#include "heisenperim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Sub-Finsler Heisenberg perimeter toolkit: builds metric balls and "
        "bubble sets, computes Minkowski / anti-Minkowski surface content, "
        "and reports isoperimetric ratios."};
    app.require_subcommand(1);

    heis::cli::RunConfig cfg;
    auto add_common = [&](CLI::App* sub, bool with_surface) {
        sub->add_option("--body", cfg.body,
                        "metric body: diamond|square|disk|ngon:k|file:path");
        if (with_surface)
            sub->add_option("--surface", cfg.surface,
                            "surface: square-bubble|q-bubble|dual-bubble|pansu-bubble|"
                            "cc-ball|graph:expr|mesh:path");
        sub->add_option("--rtol", cfg.rtol, "quadrature relative tolerance, in (0, 0.1]");
        sub->add_option("--resolution", cfg.resolution, "sampling resolution (>= 16)");
        sub->add_option("--out", cfg.out, "output path (default: stdout)");
        sub->add_option("--format", cfg.format, "output format: csv|json|obj");
        sub->add_option("--domain", cfg.domain, "graph domain x0,x1,y0,y1")->delimiter(',');
    };

    CLI::App* dual = app.add_subcommand("dual", "polar dual of a body");
    add_common(dual, false);
    CLI::App* build = app.add_subcommand("build", "construct and export a surface");
    add_common(build, true);
    build->add_flag("--uncentered", cfg.uncentered,
                    "export bubbles over z in [0,1] instead of the centered form");
    CLI::App* perimeter =
        app.add_subcommand("perimeter", "volume, contents and isoperimetric ratios");
    add_common(perimeter, true);
    perimeter->add_option("--measure", cfg.measure, "mink|anti|both");
    CLI::App* table = app.add_subcommand(
        "table53", "comparison table of four reference surfaces in the diamond metric");
    add_common(table, false);
    CLI::App* bounds =
        app.add_subcommand("bounds", "sandwich, scaling, containment and approximation checks");
    add_common(bounds, true);
    bounds->add_option("--scale", cfg.scale, "body scaling factor for the scaling check");
    bounds->add_option("--napprox", cfg.napprox, "strong approximation level n (>= 2)");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.validate();
        if (dual->parsed()) return heis::cli::cmd_dual(cfg);
        if (build->parsed()) return heis::cli::cmd_build(cfg);
        if (perimeter->parsed()) return heis::cli::cmd_perimeter(cfg);
        if (table->parsed()) return heis::cli::cmd_table53(cfg);
        if (bounds->parsed()) return heis::cli::cmd_bounds(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
