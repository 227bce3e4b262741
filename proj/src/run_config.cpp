#include "pdcp/run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pdcp/csv_io.hpp"
#include "pdcp/discrete_operator.hpp"
#include "pdcp/greeks.hpp"

namespace pdcp {

namespace fs = std::filesystem;

RunConfig RunConfig::preset_1d() {
    RunConfig c;
    c.dim = 1;
    c.params_1d = {0.40, 0.02, 0.5, 100.0, 500.0};
    c.params_2d = {0.30, 0.40, 0.50, 0.01, 0.5, 100.0, 500.0};
    c.m = 200;
    c.methods = {"be", "cn", "dirka", "dirkb", "lobatto"};
    c.n_list = {10, 20, 40, 80};
    return c;
}

RunConfig RunConfig::preset_2d() {
    RunConfig c = preset_1d();
    c.dim = 2;
    c.m = 100;
    c.methods = {"be", "cn", "dirka", "dirkb"};
    return c;
}

void RunConfig::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("RunConfig: dim must be 1 or 2");
    if (dim == 1)
        params_1d.validate();
    else
        params_2d.validate();
    if (m < 3) throw std::invalid_argument("RunConfig: m must be at least 3");
    if (methods.empty()) throw std::invalid_argument("RunConfig: no methods selected");
    for (const auto& name : methods) StepperSpec::parse(name, 1, temporal_kind(), 0);
    if (n_list.empty()) throw std::invalid_argument("RunConfig: n-list is empty");
    for (int n : n_list)
        if (n < 1) throw std::invalid_argument("RunConfig: every N must be >= 1");
    if (temporal_grid != "uniform" && temporal_grid != "quadratic")
        throw std::invalid_argument("RunConfig: grid must be 'uniform' or 'quadratic'");
    if (!roi.empty() && roi.size() != 2)
        throw std::invalid_argument("RunConfig: roi needs exactly two values");
    region().validate();
    if (jobs < 1) throw std::invalid_argument("RunConfig: jobs must be >= 1");
    if (reference_n < 0) throw std::invalid_argument("RunConfig: reference-n must be >= 0");
    penalty.validate();
}

TemporalGridKind RunConfig::temporal_kind() const {
    return temporal_grid == "uniform" ? TemporalGridKind::Uniform : TemporalGridKind::Quadratic;
}

RegionOfInterest RunConfig::region() const {
    if (!roi.empty()) return {roi[0], roi[1]};
    double strike = dim == 1 ? params_1d.strike : params_2d.strike;
    return dim == 1 ? RegionOfInterest::default_1d(strike)
                    : RegionOfInterest::default_2d(strike);
}

int RunConfig::damping_for(const std::string& method) const {
    if (damping_steps >= 0) return damping_steps;
    if (dim == 1) return 2;
    // 2D: the DIRK pairs are run undamped; be and cn keep two damping steps.
    if (method == "dirka" || method == "dirkb" || method == "lobatto") return 0;
    return 2;
}

std::vector<StepperSpec> RunConfig::stepper_prototypes() const {
    std::vector<StepperSpec> protos;
    protos.reserve(methods.size());
    for (const auto& name : methods)
        protos.push_back(StepperSpec::parse(name, 1, temporal_kind(), damping_for(name)));
    return protos;
}

std::string RunConfig::resolved_cache_dir() const {
    if (!cache_dir.empty()) return cache_dir;
    return (fs::path(out_dir) / "cache").string();
}

namespace {

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

RunSummary summarize(const std::string& method, const SolveResult& sol) {
    RunSummary s;
    s.method = method;
    s.n_steps = static_cast<int>(sol.traces.size());
    s.succeeded = true;
    for (const auto& t : sol.traces) {
        s.kappa_max = std::max({s.kappa_max, t.kappa1, t.kappa2});
        s.linear_iterations += t.linear_iterations;
    }
    s.traces = sol.traces;
    return s;
}

ReferenceSolution build_reference_for(const RunConfig& config) {
    if (config.dim == 1) {
        int n = config.reference_n > 0 ? config.reference_n : 2000;
        return build_reference_1d(config.params_1d, config.m, config.resolved_cache_dir(), n);
    }
    int n = config.reference_n > 0 ? config.reference_n : 500;
    return build_reference_2d(config.params_2d, config.m, config.resolved_cache_dir(), n,
                              config.penalty);
}

}  // namespace

int cmd_price(const RunConfig& config, std::ostream& out) {
    config.validate();
    const std::string& method = config.methods.front();
    StepperSpec spec = StepperSpec::parse(method, config.n_list.front(), config.temporal_kind(),
                                          config.damping_for(method));

    double strike = config.dim == 1 ? config.params_1d.strike : config.params_2d.strike;
    double s_max = config.dim == 1 ? config.params_1d.s_max : config.params_2d.s_max;
    SpatialGrid grid = build_grid(config.m, strike, s_max);
    DiscreteProblem problem = config.dim == 1 ? assemble_1d(config.params_1d, grid)
                                              : assemble_2d(config.params_2d, grid);

    SolveResult sol = solve_pdcp(problem, spec, config.penalty);

    fs::path dir(config.out_dir);
    double price = 0.0;
    if (config.dim == 1) {
        GreekSurfaces1D g = greeks_1d(grid, sol.u);
        auto os = open_output(dir / "surface.csv");
        write_surface_1d_csv(os, grid,
                             {{"value", &sol.u}, {"delta", &g.delta}, {"gamma", &g.gamma}});
        price = interpolate_1d(grid, sol.u, strike);
    } else {
        GreekSurfaces2D g = greeks_2d(grid, grid, sol.u);
        auto os = open_output(dir / "surface.csv");
        write_surface_2d_csv(os, grid, grid,
                             {{"value", &sol.u},
                              {"delta1", &g.delta1},
                              {"delta2", &g.delta2},
                              {"gamma11", &g.gamma11},
                              {"gamma12", &g.gamma12},
                              {"gamma22", &g.gamma22}});
        price = interpolate_2d(grid, grid, sol.u, strike, strike);
    }

    RunSummary summary = summarize(method, sol);
    {
        auto os = open_output(dir / "traces.csv");
        write_traces_csv(os, {summary});
    }
    if (config.dump_matrix) {
        auto os = open_output(dir / "matrix.coo");
        write_matrix_coo(os, problem.a);
    }

    out << "method " << method << " N " << spec.n_steps << " grid " << config.temporal_grid
        << " m " << config.m << '\n';
    if (config.dim == 1)
        out << "value at strike " << format_double(strike) << ": " << format_double(price) << '\n';
    else
        out << "value at (" << format_double(strike) << ", " << format_double(strike)
            << "): " << format_double(price) << '\n';
    out << "penalty iterations max " << summary.kappa_max << ", linear iterations "
        << summary.linear_iterations << '\n';
    out << "wrote " << (dir / "surface.csv").string() << '\n';
    return 0;
}

int cmd_converge(const RunConfig& config, std::ostream& out) {
    config.validate();
    ReferenceSolution ref = build_reference_for(config);
    out << "reference " << (ref.from_cache ? "loaded" : "built") << " (key " << ref.key << ", N "
        << ref.n_steps << ")\n";

    SweepConfig sweep;
    sweep.methods = config.stepper_prototypes();
    sweep.n_values = config.n_list;
    sweep.grid_kind = config.temporal_kind();
    sweep.roi = config.region();
    sweep.penalty = config.penalty;
    sweep.jobs = config.jobs;

    ErrorReport report = config.dim == 1
                             ? convergence_sweep_1d(config.params_1d, config.m, sweep, ref)
                             : convergence_sweep_2d(config.params_2d, config.m, sweep, ref);

    fs::path dir(config.out_dir);
    {
        auto os = open_output(dir / "errors.csv");
        write_error_rows_csv(os, report.rows);
    }
    std::vector<OrderFit> fits = fit_orders(report);
    {
        auto os = open_output(dir / "orders.csv");
        write_order_fits_csv(os, fits);
    }
    {
        auto os = open_output(dir / "traces.csv");
        write_traces_csv(os, report.runs);
    }

    for (const auto& run : report.runs) {
        out << run.method << " N " << run.n_steps;
        if (run.succeeded)
            out << " ok, kappa max " << run.kappa_max << ", linear iterations "
                << run.linear_iterations << '\n';
        else
            out << " FAILED: " << run.failure_reason << '\n';
    }
    for (const auto& f : fits)
        out << f.method << ' ' << f.quantity << " order " << format_double(f.order) << " (N "
            << f.n_min << ".." << f.n_max << ")\n";
    out << "wrote " << (dir / "errors.csv").string() << '\n';
    return report.all_succeeded() ? 0 : 1;
}

int cmd_reference(const RunConfig& config, std::ostream& out) {
    config.validate();
    ReferenceSolution ref = build_reference_for(config);
    out << "reference " << (ref.from_cache ? "loaded from cache" : "built") << '\n';
    out << "key " << ref.key << '\n';
    out << "provenance " << ref.provenance << '\n';
    out << "cache dir " << config.resolved_cache_dir() << '\n';
    if (ref.dims == 1)
        out << "max complementarity residual "
            << format_double(ref.max_complementarity_residual) << '\n';
    return 0;
}

void print_config(const RunConfig& config, std::ostream& out) {
    out << "dim=" << config.dim << '\n';
    if (config.dim == 1) {
        out << "sigma=" << format_double(config.params_1d.sigma) << '\n'
            << "r=" << format_double(config.params_1d.r) << '\n'
            << "maturity=" << format_double(config.params_1d.maturity) << '\n'
            << "strike=" << format_double(config.params_1d.strike) << '\n'
            << "s_max=" << format_double(config.params_1d.s_max) << '\n';
    } else {
        out << "sigma1=" << format_double(config.params_2d.sigma1) << '\n'
            << "sigma2=" << format_double(config.params_2d.sigma2) << '\n'
            << "rho=" << format_double(config.params_2d.rho) << '\n'
            << "r=" << format_double(config.params_2d.r) << '\n'
            << "maturity=" << format_double(config.params_2d.maturity) << '\n'
            << "strike=" << format_double(config.params_2d.strike) << '\n'
            << "s_max=" << format_double(config.params_2d.s_max) << '\n';
    }
    out << "m=" << config.m << '\n';
    out << "methods=";
    for (std::size_t i = 0; i < config.methods.size(); ++i)
        out << (i ? "," : "") << config.methods[i];
    out << '\n';
    out << "n-list=";
    for (std::size_t i = 0; i < config.n_list.size(); ++i)
        out << (i ? "," : "") << config.n_list[i];
    out << '\n';
    out << "grid=" << config.temporal_grid << '\n';
    out << "damping-steps=" << config.damping_steps << '\n';
    RegionOfInterest r = config.region();
    out << "roi=" << format_double(r.lo) << ',' << format_double(r.hi) << '\n';
    out << "out=" << config.out_dir << '\n';
    out << "cache-dir=" << config.resolved_cache_dir() << '\n';
    out << "jobs=" << config.jobs << '\n';
    out << "reference-n=" << config.reference_n << '\n';
    out << "penalty-large=" << format_double(config.penalty.large) << '\n';
    out << "penalty-tol=" << format_double(config.penalty.tolerance) << '\n';
    out << "penalty-max-iters=" << config.penalty.max_iterations << '\n';
}

}  // namespace pdcp
