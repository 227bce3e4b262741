#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdcp/run_config.hpp"

namespace {

struct CliValues {
    std::string preset = "1d";
    int dim = 0;
    std::size_t m = 0;
    std::vector<std::string> methods;
    std::vector<int> n_list;
    std::string grid;
    int damping_steps = -2;  // sentinel: untouched
    std::vector<double> roi;
    std::string out_dir;
    std::string cache_dir;
    int jobs = 0;
    int reference_n = -1;
    double penalty_large = 0.0;
    double penalty_tol = 0.0;
    int penalty_max_iters = 0;
    bool dump_matrix = false;
};

pdcp::RunConfig resolve(const CLI::App& app, const CliValues& v) {
    int dim = app.count("--dim") ? v.dim : (v.preset == "2d" ? 2 : 1);
    pdcp::RunConfig cfg = dim == 2 ? pdcp::RunConfig::preset_2d() : pdcp::RunConfig::preset_1d();
    if (app.count("--m")) cfg.m = v.m;
    if (app.count("--methods")) cfg.methods = v.methods;
    if (app.count("--n-list")) cfg.n_list = v.n_list;
    if (app.count("--grid")) cfg.temporal_grid = v.grid;
    if (app.count("--damping-steps")) cfg.damping_steps = v.damping_steps;
    if (app.count("--roi")) cfg.roi = v.roi;
    if (app.count("--out")) cfg.out_dir = v.out_dir;
    if (app.count("--cache-dir")) cfg.cache_dir = v.cache_dir;
    if (app.count("--jobs")) cfg.jobs = v.jobs;
    if (app.count("--reference-n")) cfg.reference_n = v.reference_n;
    if (app.count("--penalty-large")) cfg.penalty.large = v.penalty_large;
    if (app.count("--penalty-tol")) cfg.penalty.tolerance = v.penalty_tol;
    if (app.count("--penalty-max-iters")) cfg.penalty.max_iterations = v.penalty_max_iters;
    cfg.dump_matrix = v.dump_matrix;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"American option pricing by penalty-adapted implicit time stepping"};
    app.fallthrough(true);
    app.set_config("--config", "", "Read options from an INI key=value file");

    CliValues v;
    app.add_option("--preset", v.preset, "Parameter preset: 1d or 2d")
        ->check(CLI::IsMember({"1d", "2d"}))
        ->capture_default_str();
    app.add_option("--dim", v.dim, "Problem dimension (overrides the preset's)")
        ->check(CLI::IsMember({1, 2}));
    app.add_option("--m", v.m, "Spatial nodes per direction");
    app.add_option("--methods", v.methods,
                   "Time-stepping methods (be, cn, dirka, dirkb, lobatto)")
        ->delimiter(',');
    app.add_option("--n-list", v.n_list, "Time step counts N to run")->delimiter(',');
    app.add_option("--grid", v.grid, "Temporal grid: uniform or quadratic")
        ->check(CLI::IsMember({"uniform", "quadratic"}));
    app.add_option("--damping-steps", v.damping_steps,
                   "Initial backward Euler steps (-1 keeps per-method defaults)");
    app.add_option("--roi", v.roi, "Error region lo,hi (open interval)")
        ->delimiter(',')
        ->expected(2);
    app.add_option("--out", v.out_dir, "Output directory");
    app.add_option("--cache-dir", v.cache_dir, "Reference cache directory");
    app.add_option("--jobs", v.jobs, "Worker threads for sweeps");
    app.add_option("--reference-n", v.reference_n, "Override the reference step count");
    app.add_option("--penalty-large", v.penalty_large, "Penalty weight");
    app.add_option("--penalty-tol", v.penalty_tol, "Penalty stopping tolerance");
    app.add_option("--penalty-max-iters", v.penalty_max_iters, "Penalty iteration cap");

    CLI::App* price = app.add_subcommand("price", "Solve once and write surfaces");
    price->add_flag("--dump-matrix", v.dump_matrix, "Also write the operator in COO form");
    CLI::App* converge = app.add_subcommand("converge", "Run the temporal convergence study");
    CLI::App* reference = app.add_subcommand("reference", "Build or reload the reference solution");
    CLI::App* show = app.add_subcommand("show-config", "Print the resolved configuration");
    app.require_subcommand(0, 1);

    CLI11_PARSE(app, argc, argv);

    try {
        pdcp::RunConfig cfg = resolve(app, v);
        if (price->parsed()) return pdcp::cmd_price(cfg, std::cout);
        if (converge->parsed()) return pdcp::cmd_converge(cfg, std::cout);
        if (reference->parsed()) return pdcp::cmd_reference(cfg, std::cout);
        if (show->parsed()) {
            cfg.validate();
            pdcp::print_config(cfg, std::cout);
            return 0;
        }
        std::cout << app.help();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
