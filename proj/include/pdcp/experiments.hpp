#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pdcp/greeks.hpp"
#include "pdcp/market.hpp"
#include "pdcp/spatial_grid.hpp"
#include "pdcp/steppers.hpp"

namespace pdcp {

/// Open interval of spot values over which errors are measured; in 2D the
/// same interval applies to both coordinates. Strict containment keeps the
/// extrapolated boundary stencils of the Greeks out of the metric.
struct RegionOfInterest {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double s) const { return lo < s && s < hi; }
    void validate() const;

    static RegionOfInterest default_1d(double strike) { return {0.8 * strike, 1.2 * strike}; }
    static RegionOfInterest default_2d(double strike) { return {0.9 * strike, 1.1 * strike}; }
};

/// Max-norm difference over the grid nodes strictly inside the region.
/// Throws std::invalid_argument if no node falls inside.
double roi_max_error_1d(const SpatialGrid& grid, const std::vector<double>& values,
                        const std::vector<double>& reference, const RegionOfInterest& roi);

/// Same over tensor nodes with both coordinates strictly inside.
double roi_max_error_2d(const SpatialGrid& grid_s1, const SpatialGrid& grid_s2,
                        const std::vector<double>& values, const std::vector<double>& reference,
                        const RegionOfInterest& roi);

/// Time-accurate solution on a fixed spatial grid, used as the truth when
/// measuring temporal errors on that same grid.
struct ReferenceSolution {
    int dims = 1;
    std::size_t m = 0;
    std::vector<double> u;
    std::string key;         // content hash of parameters and protocol
    std::string provenance;  // the hashed description, human-readable
    int n_steps = 0;
    double max_complementarity_residual = 0.0;  // direct-solver references only
    bool from_cache = false;
};

/// 1D reference: two-stage DIRK (theta = 1 - sqrt(2)/2) on the quadratic
/// temporal grid with two backward Euler damping steps, every stage solved as
/// an exact LCP by Brennan-Schwartz. No penalty term is involved, so the
/// reference is independent of the penalty machinery it is used to judge.
/// cache_dir may be empty to disable caching; a cached vector is reloaded
/// only if its sidecar matches the content key and the byte count is right.
ReferenceSolution build_reference_1d(const MarketParams1D& params, std::size_t m,
                                     const std::string& cache_dir, int n_steps = 2000);

/// 2D reference: the same DIRK method run through the penalty solver (no
/// damping) on the quadratic temporal grid.
ReferenceSolution build_reference_2d(const MarketParams2D& params, std::size_t m,
                                     const std::string& cache_dir, int n_steps = 500,
                                     const PenaltyConfig& penalty = {});

/// One measured error: the ROI max-norm distance to the reference for one
/// solved quantity. error is NaN when the run failed.
struct ErrorRow {
    std::string method;
    std::size_t m = 0;
    int n_steps = 0;
    std::string grid_kind;  // "uniform" or "quadratic"
    std::string quantity;   // value, delta, gamma / value, delta1, ..., gamma22
    double error = 0.0;
};

/// Per-run diagnostics kept alongside the error rows.
struct RunSummary {
    std::string method;
    int n_steps = 0;
    bool succeeded = false;
    std::string failure_reason;
    int kappa_max = 0;
    long linear_iterations = 0;
    double min_constraint_margin = 0.0;  // min(u - u0) of the final solution
    std::vector<StepTrace> traces;
};

struct ErrorReport {
    std::vector<ErrorRow> rows;
    std::vector<RunSummary> runs;

    bool all_succeeded() const;
};

/// Least-squares slope of log(error) against log(N), negated; this is the
/// observed temporal order. Pairs with nonpositive error are excluded with a
/// note on stderr; fewer than three usable pairs is an error.
double estimate_order(const std::vector<std::pair<int, double>>& n_error_pairs);

struct OrderFit {
    std::string method;
    std::size_t m = 0;
    std::string grid_kind;
    std::string quantity;
    int n_min = 0;
    int n_max = 0;
    int points = 0;
    double order = 0.0;
};

/// Fits one order per (method, quantity) group of the report, in first
/// appearance order. Groups with fewer than three usable rows are skipped.
std::vector<OrderFit> fit_orders(const ErrorReport& report);

struct SweepConfig {
    std::vector<StepperSpec> methods;  // n_steps and grid_kind overridden per run
    std::vector<int> n_values;
    TemporalGridKind grid_kind = TemporalGridKind::Quadratic;
    RegionOfInterest roi;
    PenaltyConfig penalty;
    int jobs = 1;
};

/// Runs every (method, N) combination against the reference and measures ROI
/// errors of the value and the Greeks. A failed run contributes NaN rows and
/// a failure summary instead of aborting the sweep. Row order is methods
/// outer, N inner, quantities innermost, independent of jobs.
ErrorReport convergence_sweep_1d(const MarketParams1D& params, std::size_t m,
                                 const SweepConfig& config, const ReferenceSolution& reference);

ErrorReport convergence_sweep_2d(const MarketParams2D& params, std::size_t m,
                                 const SweepConfig& config, const ReferenceSolution& reference);

/// Piecewise-linear interpolation of a nodal field at spot s in [0, s_max].
double interpolate_1d(const SpatialGrid& grid, const std::vector<double>& u, double s);

/// Bilinear interpolation on the tensor grid.
double interpolate_2d(const SpatialGrid& grid_s1, const SpatialGrid& grid_s2,
                      const std::vector<double>& u, double s1, double s2);

}  // namespace pdcp
