#include "pdcp/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "pdcp/csv_io.hpp"
#include "pdcp/discrete_operator.hpp"
#include "pdcp/lcp_oracle.hpp"

namespace pdcp {

void RegionOfInterest::validate() const {
    if (!(lo >= 0.0) || !(hi > lo))
        throw std::invalid_argument("RegionOfInterest: need 0 <= lo < hi");
}

double roi_max_error_1d(const SpatialGrid& grid, const std::vector<double>& values,
                        const std::vector<double>& reference, const RegionOfInterest& roi) {
    roi.validate();
    if (values.size() != grid.m || reference.size() != grid.m)
        throw std::invalid_argument("roi_max_error_1d: field size mismatch");
    double worst = -1.0;
    for (std::size_t i = 0; i < grid.m; ++i)
        if (roi.contains(grid.points[i]))
            worst = std::max(worst, std::abs(values[i] - reference[i]));
    if (worst < 0.0)
        throw std::invalid_argument("roi_max_error_1d: no grid node inside the region");
    return worst;
}

double roi_max_error_2d(const SpatialGrid& grid_s1, const SpatialGrid& grid_s2,
                        const std::vector<double>& values, const std::vector<double>& reference,
                        const RegionOfInterest& roi) {
    roi.validate();
    std::size_t total = grid_s1.m * grid_s2.m;
    if (values.size() != total || reference.size() != total)
        throw std::invalid_argument("roi_max_error_2d: field size mismatch");
    double worst = -1.0;
    for (std::size_t i = 0; i < grid_s1.m; ++i) {
        if (!roi.contains(grid_s1.points[i])) continue;
        for (std::size_t j = 0; j < grid_s2.m; ++j)
            if (roi.contains(grid_s2.points[j])) {
                std::size_t l = i * grid_s2.m + j;
                worst = std::max(worst, std::abs(values[l] - reference[l]));
            }
    }
    if (worst < 0.0)
        throw std::invalid_argument("roi_max_error_2d: no grid node inside the region");
    return worst;
}

namespace {

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

namespace fs = std::filesystem;

bool try_load_cached(const std::string& cache_dir, ReferenceSolution& ref) {
    fs::path bin = fs::path(cache_dir) / ("ref_" + ref.key + ".bin");
    fs::path txt = fs::path(cache_dir) / ("ref_" + ref.key + ".txt");
    std::error_code ec;
    if (!fs::exists(bin, ec) || !fs::exists(txt, ec)) return false;

    std::ifstream side(txt);
    if (!side) return false;
    std::map<std::string, std::string> fields;
    std::string line;
    while (std::getline(side, line)) {
        auto pos = line.find(' ');
        if (pos != std::string::npos) fields[line.substr(0, pos)] = line.substr(pos + 1);
    }
    std::size_t count = 0;
    try {
        if (fields.at("key") != ref.key) return false;
        if (std::stoi(fields.at("dims")) != ref.dims) return false;
        if (std::stoul(fields.at("m")) != ref.m) return false;
        if (std::stoi(fields.at("n_steps")) != ref.n_steps) return false;
        count = std::stoul(fields.at("count"));
        ref.max_complementarity_residual = std::stod(fields.at("residual"));
    } catch (const std::exception&) {
        return false;
    }

    if (fs::file_size(bin, ec) != count * sizeof(double) || ec) return false;
    std::ifstream in(bin, std::ios::binary);
    if (!in) return false;
    ref.u.resize(count);
    in.read(reinterpret_cast<char*>(ref.u.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) return false;
    ref.from_cache = true;
    return true;
}

void save_cached(const std::string& cache_dir, const ReferenceSolution& ref) {
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    fs::path bin = fs::path(cache_dir) / ("ref_" + ref.key + ".bin");
    fs::path txt = fs::path(cache_dir) / ("ref_" + ref.key + ".txt");
    {
        std::ofstream out(bin, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(ref.u.data()),
                  static_cast<std::streamsize>(ref.u.size() * sizeof(double)));
        if (!out) return;  // cache write failure is not fatal
    }
    std::ofstream side(txt, std::ios::trunc);
    side << "key " << ref.key << '\n'
         << "dims " << ref.dims << '\n'
         << "m " << ref.m << '\n'
         << "n_steps " << ref.n_steps << '\n'
         << "count " << ref.u.size() << '\n'
         << "residual " << format_double(ref.max_complementarity_residual) << '\n'
         << "provenance " << ref.provenance << '\n';
}

}  // namespace

ReferenceSolution build_reference_1d(const MarketParams1D& params, std::size_t m,
                                     const std::string& cache_dir, int n_steps) {
    params.validate();
    ReferenceSolution ref;
    ref.dims = 1;
    ref.m = m;
    ref.n_steps = n_steps;
    ref.provenance = "ref1d|sigma=" + format_double(params.sigma) + "|r=" +
                     format_double(params.r) + "|T=" + format_double(params.maturity) + "|K=" +
                     format_double(params.strike) + "|smax=" + format_double(params.s_max) +
                     "|m=" + std::to_string(m) +
                     "|space=cellavg-stretched|protocol=dirk+brennan-schwartz" +
                     "|temporal=quadratic|N=" + std::to_string(n_steps) + "|damping=2";
    ref.key = fnv1a_hex(ref.provenance);
    if (!cache_dir.empty() && try_load_cached(cache_dir, ref)) return ref;

    SpatialGrid grid = build_grid(m, params.strike, params.s_max);
    DiscreteProblem problem = assemble_1d(params, grid);
    StepperSpec spec = StepperSpec::dirka(n_steps, TemporalGridKind::Quadratic, 2);
    DirectSolveResult sol = solve_pdcp_direct_1d(problem, spec);
    ref.u = std::move(sol.u);
    ref.max_complementarity_residual = sol.max_complementarity_residual;
    if (!cache_dir.empty()) save_cached(cache_dir, ref);
    return ref;
}

ReferenceSolution build_reference_2d(const MarketParams2D& params, std::size_t m,
                                     const std::string& cache_dir, int n_steps,
                                     const PenaltyConfig& penalty) {
    params.validate();
    penalty.validate();
    ReferenceSolution ref;
    ref.dims = 2;
    ref.m = m;
    ref.n_steps = n_steps;
    ref.provenance = "ref2d|sigma1=" + format_double(params.sigma1) + "|sigma2=" +
                     format_double(params.sigma2) + "|rho=" + format_double(params.rho) + "|r=" +
                     format_double(params.r) + "|T=" + format_double(params.maturity) + "|K=" +
                     format_double(params.strike) + "|smax=" + format_double(params.s_max) +
                     "|m=" + std::to_string(m) + "|space=cellavg-stretched|protocol=dirk-penalty" +
                     "|temporal=quadratic|N=" + std::to_string(n_steps) + "|damping=0" +
                     "|large=" + format_double(penalty.large) +
                     "|ptol=" + format_double(penalty.tolerance) +
                     "|pmax=" + std::to_string(penalty.max_iterations);
    ref.key = fnv1a_hex(ref.provenance);
    if (!cache_dir.empty() && try_load_cached(cache_dir, ref)) return ref;

    SpatialGrid grid = build_grid(m, params.strike, params.s_max);
    DiscreteProblem problem = assemble_2d(params, grid);
    StepperSpec spec = StepperSpec::dirka(n_steps, TemporalGridKind::Quadratic, 0);
    SolveResult sol = solve_pdcp(problem, spec, penalty);
    ref.u = std::move(sol.u);
    if (!cache_dir.empty()) save_cached(cache_dir, ref);
    return ref;
}

bool ErrorReport::all_succeeded() const {
    for (const auto& r : runs)
        if (!r.succeeded) return false;
    return !runs.empty();
}

double estimate_order(const std::vector<std::pair<int, double>>& n_error_pairs) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, e] : n_error_pairs) {
        if (e > 0.0 && std::isfinite(e)) {
            pts.emplace_back(std::log(static_cast<double>(n)), std::log(e));
        } else {
            std::cerr << "estimate_order: excluding nonpositive or non-finite error at N=" << n
                      << '\n';
        }
    }
    if (pts.size() < 3)
        throw std::invalid_argument("estimate_order: fewer than three usable (N, error) pairs");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    return -slope;
}

std::vector<OrderFit> fit_orders(const ErrorReport& report) {
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<std::pair<int, double>>> groups;
    std::map<std::string, const ErrorRow*> group_row;
    for (const auto& row : report.rows) {
        std::string key = row.method + '|' + std::to_string(row.m) + '|' + row.grid_kind + '|' +
                          row.quantity;
        if (groups.find(key) == groups.end()) {
            group_order.push_back(key);
            group_row[key] = &row;
        }
        groups[key].emplace_back(row.n_steps, row.error);
    }

    std::vector<OrderFit> fits;
    for (const auto& key : group_order) {
        std::vector<std::pair<int, double>> usable;
        for (const auto& p : groups[key])
            if (p.second > 0.0 && std::isfinite(p.second)) usable.push_back(p);
        if (usable.size() < 3) {
            std::cerr << "fit_orders: skipping group " << key << " with " << usable.size()
                      << " usable points\n";
            continue;
        }
        const ErrorRow* r = group_row[key];
        OrderFit f;
        f.method = r->method;
        f.m = r->m;
        f.grid_kind = r->grid_kind;
        f.quantity = r->quantity;
        f.points = static_cast<int>(usable.size());
        f.n_min = usable.front().first;
        f.n_max = usable.front().first;
        for (const auto& p : usable) {
            f.n_min = std::min(f.n_min, p.first);
            f.n_max = std::max(f.n_max, p.first);
        }
        f.order = estimate_order(usable);
        fits.push_back(std::move(f));
    }
    return fits;
}

namespace {

const char* grid_kind_name(TemporalGridKind kind) {
    return kind == TemporalGridKind::Uniform ? "uniform" : "quadratic";
}

struct RunSlot {
    RunSummary summary;
    std::vector<std::pair<std::string, double>> errors;
};

// Shared sweep driver: runs every (method, N) pair, measure() turning a final
// solution into per-quantity ROI errors.
ErrorReport run_sweep(const DiscreteProblem& problem, const SweepConfig& config,
                      const std::vector<std::string>& quantity_names,
                      const std::function<std::vector<std::pair<std::string, double>>(
                          const std::vector<double>&)>& measure) {
    if (config.methods.empty()) throw std::invalid_argument("convergence_sweep: no methods");
    if (config.n_values.empty()) throw std::invalid_argument("convergence_sweep: no step counts");
    for (int n : config.n_values)
        if (n < 1) throw std::invalid_argument("convergence_sweep: every N must be >= 1");
    config.roi.validate();
    config.penalty.validate();

    std::size_t total = config.methods.size() * config.n_values.size();
    std::vector<RunSlot> slots(total);

    auto run_one = [&](std::size_t idx) {
        std::size_t mi = idx / config.n_values.size();
        std::size_t ni = idx % config.n_values.size();
        StepperSpec spec = config.methods[mi];
        spec.n_steps = config.n_values[ni];
        spec.grid_kind = config.grid_kind;

        RunSlot& slot = slots[idx];
        slot.summary.method = spec.name;
        slot.summary.n_steps = spec.n_steps;
        try {
            SolveResult sol = solve_pdcp(problem, spec, config.penalty);
            slot.summary.succeeded = true;
            for (const auto& t : sol.traces) {
                slot.summary.kappa_max = std::max({slot.summary.kappa_max, t.kappa1, t.kappa2});
                slot.summary.linear_iterations += t.linear_iterations;
            }
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < sol.u.size(); ++l)
                margin = std::min(margin, sol.u[l] - problem.u0[l]);
            slot.summary.min_constraint_margin = margin;
            slot.summary.traces = std::move(sol.traces);
            slot.errors = measure(sol.u);
        } catch (const std::exception& e) {
            slot.summary.succeeded = false;
            slot.summary.failure_reason = e.what();
        }
    };

    int jobs = std::max(1, config.jobs);
    if (jobs <= 1 || total <= 1) {
        for (std::size_t idx = 0; idx < total; ++idx) run_one(idx);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t idx = next.fetch_add(1);
                if (idx >= total) return;
                run_one(idx);
            }
        };
        std::vector<std::thread> pool;
        int count = std::min<std::size_t>(jobs, total);
        pool.reserve(count);
        for (int t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ErrorReport report;
    double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t idx = 0; idx < total; ++idx) {
        RunSlot& slot = slots[idx];
        int n_steps = slot.summary.n_steps;
        if (slot.summary.succeeded) {
            for (const auto& [quantity, error] : slot.errors)
                report.rows.push_back({slot.summary.method, problem.m, n_steps,
                                       grid_kind_name(config.grid_kind), quantity, error});
        } else {
            for (const auto& quantity : quantity_names)
                report.rows.push_back({slot.summary.method, problem.m, n_steps,
                                       grid_kind_name(config.grid_kind), quantity, nan});
        }
        report.runs.push_back(std::move(slot.summary));
    }
    return report;
}

void check_reference(const ReferenceSolution& reference, int dims, std::size_t expected_size,
                     std::size_t m) {
    if (reference.dims != dims || reference.m != m || reference.u.size() != expected_size)
        throw std::invalid_argument("convergence_sweep: reference does not match the problem");
}

}  // namespace

ErrorReport convergence_sweep_1d(const MarketParams1D& params, std::size_t m,
                                 const SweepConfig& config, const ReferenceSolution& reference) {
    params.validate();
    SpatialGrid grid = build_grid(m, params.strike, params.s_max);
    DiscreteProblem problem = assemble_1d(params, grid);
    check_reference(reference, 1, problem.size(), m);

    GreekSurfaces1D ref_greeks = greeks_1d(grid, reference.u);
    auto measure = [&](const std::vector<double>& u) {
        GreekSurfaces1D g = greeks_1d(grid, u);
        std::vector<std::pair<std::string, double>> out;
        out.emplace_back("value", roi_max_error_1d(grid, u, reference.u, config.roi));
        out.emplace_back("delta", roi_max_error_1d(grid, g.delta, ref_greeks.delta, config.roi));
        out.emplace_back("gamma", roi_max_error_1d(grid, g.gamma, ref_greeks.gamma, config.roi));
        return out;
    };
    return run_sweep(problem, config, {"value", "delta", "gamma"}, measure);
}

double interpolate_1d(const SpatialGrid& grid, const std::vector<double>& u, double s) {
    if (u.size() != grid.m) throw std::invalid_argument("interpolate_1d: field size mismatch");
    if (!(s >= 0.0 && s <= grid.s_max))
        throw std::invalid_argument("interpolate_1d: spot outside [0, s_max]");
    auto it = std::lower_bound(grid.points.begin(), grid.points.end(), s);
    if (it == grid.points.begin()) return u.front();
    if (it == grid.points.end()) return u.back();
    std::size_t hi = static_cast<std::size_t>(it - grid.points.begin());
    std::size_t lo = hi - 1;
    double w = (s - grid.points[lo]) / (grid.points[hi] - grid.points[lo]);
    return (1.0 - w) * u[lo] + w * u[hi];
}

double interpolate_2d(const SpatialGrid& grid_s1, const SpatialGrid& grid_s2,
                      const std::vector<double>& u, double s1, double s2) {
    if (u.size() != grid_s1.m * grid_s2.m)
        throw std::invalid_argument("interpolate_2d: field size mismatch");
    std::vector<double> slice(grid_s1.m);
    for (std::size_t i = 0; i < grid_s1.m; ++i) {
        std::vector<double> row(u.begin() + i * grid_s2.m, u.begin() + (i + 1) * grid_s2.m);
        slice[i] = interpolate_1d(grid_s2, row, s2);
    }
    return interpolate_1d(grid_s1, slice, s1);
}

ErrorReport convergence_sweep_2d(const MarketParams2D& params, std::size_t m,
                                 const SweepConfig& config, const ReferenceSolution& reference) {
    params.validate();
    SpatialGrid grid = build_grid(m, params.strike, params.s_max);
    DiscreteProblem problem = assemble_2d(params, grid);
    check_reference(reference, 2, problem.size(), m);

    GreekSurfaces2D ref_greeks = greeks_2d(grid, grid, reference.u);
    auto measure = [&](const std::vector<double>& u) {
        GreekSurfaces2D g = greeks_2d(grid, grid, u);
        std::vector<std::pair<std::string, double>> out;
        auto err = [&](const std::vector<double>& a, const std::vector<double>& b) {
            return roi_max_error_2d(grid, grid, a, b, config.roi);
        };
        out.emplace_back("value", err(u, reference.u));
        out.emplace_back("delta1", err(g.delta1, ref_greeks.delta1));
        out.emplace_back("delta2", err(g.delta2, ref_greeks.delta2));
        out.emplace_back("gamma11", err(g.gamma11, ref_greeks.gamma11));
        out.emplace_back("gamma12", err(g.gamma12, ref_greeks.gamma12));
        out.emplace_back("gamma22", err(g.gamma22, ref_greeks.gamma22));
        return out;
    };
    return run_sweep(problem, config,
                     {"value", "delta1", "delta2", "gamma11", "gamma12", "gamma22"}, measure);
}

}  // namespace pdcp
