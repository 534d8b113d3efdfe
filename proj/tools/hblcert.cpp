#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "hbl/cli.hpp"
#include "hbl/io.hpp"

int main(int argc, char** argv) {
    hbl::CommandConfig cfg;
    CLI::App app{"hblcert: check and build certificates for Holder-Brascamp-Lieb data"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string format = "text";
    double constant = 0;
    std::size_t map = 0, component = 0;
    app.add_option("--data", cfg.data, "datum file (JSON)");
    app.add_option("--presentation", cfg.presentation, "presentation file (JSON)");
    app.add_option("--candidates", cfg.candidates, "candidate subspace file (JSON)");
    app.add_option("--out", cfg.out, "output path (build: the presentation file; otherwise the report)");
    app.add_option("--max-lattice", cfg.max_lattice, "candidate lattice size cap")->capture_default_str();
    app.add_option("--tol", cfg.tol, "floating tolerance for numeric verdicts")->capture_default_str();
    app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    app.add_option("--format", format, "report format")
        ->check(CLI::IsMember({"text", "json", "dot"}))
        ->capture_default_str();
    auto* map_opt = app.add_option("--map", map, "project: 1-based map index");
    auto* comp_opt = app.add_option("--component", component, "decompose-flow: 1-based theta index (default: sigma)");
    app.add_option("--iterations", cfg.iterations, "gaussian: ascent iterations")->capture_default_str();
    app.add_option("--samples", cfg.samples, "gaussian: random inputs checked against the constant")->capture_default_str();
    app.add_option("--grid", cfg.grids, "quadrature: grid function file, one per map in order");
    auto* const_opt = app.add_option("--constant", constant, "quadrature: constant C");
    app.add_flag("--trace", cfg.trace, "build: include the recursion log");

    const std::map<std::string, std::string> help{
        {"verify", "check a presentation against a datum and report its constant"},
        {"check-data", "scaling identity, candidate lattice, violations and critical subspaces"},
        {"polytope", "exponent polytope of a candidate family: rows, vertices, membership"},
        {"build", "construct a presentation recursively"},
        {"bound", "constant carried by a valid presentation"},
        {"decompose-flow", "split a weight into chains"},
        {"project", "push a presentation forward through one map"},
        {"gaussian", "Gaussian ratio at the identity and seeded ascent"},
        {"quadrature", "grid quadrature of both sides of the inequality"},
        {"export-dot", "Graphviz rendering of a presentation"},
    };
    for (const auto& name : hbl::command_names()) app.add_subcommand(name, help.at(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.format = format == "json" ? hbl::OutputFormat::json
                 : format == "dot" ? hbl::OutputFormat::dot
                                   : hbl::OutputFormat::text;
    if (*map_opt) cfg.map = map;
    if (*comp_opt) cfg.component = component;
    if (*const_opt) cfg.constant = constant;

    const hbl::RunResult r = hbl::run(cfg);
    if (r.status == 2) {
        std::cerr << r.output;
        return 2;
    }
    if (!cfg.out.empty() && cfg.command != "build") {
        try {
            hbl::write_file(cfg.out, r.output);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    } else {
        std::cout << r.output;
    }
    return r.status;
}
