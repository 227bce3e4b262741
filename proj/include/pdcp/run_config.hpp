#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdcp/experiments.hpp"
#include "pdcp/market.hpp"
#include "pdcp/steppers.hpp"

namespace pdcp {

/// Everything one command invocation needs, filled from a preset and then
/// overridden by config file and command line.
struct RunConfig {
    int dim = 1;
    MarketParams1D params_1d;
    MarketParams2D params_2d;
    std::size_t m = 200;
    std::vector<std::string> methods;
    std::vector<int> n_list;
    std::string temporal_grid = "quadratic";  // or "uniform"
    int damping_steps = -1;                   // -1 keeps the per-method defaults
    std::vector<double> roi;                  // empty keeps the preset region; else {lo, hi}
    std::string out_dir = "out";
    std::string cache_dir;                    // empty resolves to <out_dir>/cache
    int jobs = 1;
    int reference_n = 0;                      // 0 keeps the reference protocol default
    PenaltyConfig penalty;
    bool dump_matrix = false;

    /// One-asset study: sigma 0.40, r 0.02, T 0.5, K 100, s_max 5K, m = 200,
    /// all five methods, N in {10, 20, 40, 80}, quadratic steps, region
    /// (80, 120), two damping steps for every method.
    static RunConfig preset_1d();

    /// Two-asset study: sigma 0.30/0.40, rho 0.50, r 0.01, T 0.5, K 100,
    /// s_max 5K, m = 100, methods be/cn/dirka/dirkb, N in {10, 20, 40, 80},
    /// quadratic steps, region (90, 110)^2. The DIRK variants run undamped;
    /// be and cn keep two damping steps.
    static RunConfig preset_2d();

    void validate() const;
    TemporalGridKind temporal_kind() const;
    RegionOfInterest region() const;
    int damping_for(const std::string& method) const;
    std::vector<StepperSpec> stepper_prototypes() const;
    std::string resolved_cache_dir() const;
};

/// Solves once (first method, first N), writes the value/Greek surfaces and
/// the per-step trace into out_dir, prints the interpolated price at the
/// strike and a penalty summary. Returns a process exit code.
int cmd_price(const RunConfig& config, std::ostream& out);

/// Builds or loads the reference, runs the convergence sweep, writes
/// errors.csv, orders.csv and traces.csv into out_dir. Completed rows are
/// written even if some runs fail; the exit code is 0 only if every run
/// converged.
int cmd_converge(const RunConfig& config, std::ostream& out);

/// Builds (or reloads) the reference solution and reports its cache location.
int cmd_reference(const RunConfig& config, std::ostream& out);

/// Prints the fully resolved configuration as key=value lines.
void print_config(const RunConfig& config, std::ostream& out);

}  // namespace pdcp
