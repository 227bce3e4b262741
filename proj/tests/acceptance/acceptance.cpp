// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failed criteria. argv[1] names a scratch directory used for the reference
// cache, so repeated runs skip the expensive reference solves.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/tree_oracles.hpp"
#include "pdcp/csv_io.hpp"
#include "pdcp/experiments.hpp"
#include "pdcp/lcp_oracle.hpp"
#include "pdcp/steppers.hpp"

using namespace pdcp;

namespace {

const MarketParams1D kParams1{0.40, 0.02, 0.5, 100.0, 500.0};
const MarketParams2D kParams2{0.30, 0.40, 0.50, 0.01, 0.5, 100.0, 500.0};

struct Gate {
    int failures = 0;

    void report(int id, const std::string& label, bool pass, const std::string& detail) {
        std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << label;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << std::endl;
        if (!pass) ++failures;
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

bool near(double x, double target, double tol) {
    return std::isfinite(x) && std::abs(x - target) <= tol;
}

DiscreteProblem scalar_problem(double lambda) {
    DiscreteProblem p;
    p.a = SparseMatrix::from_rows(1, {{{0, lambda}}});
    p.u0 = {-1e30};  // obstacle far below: the penalty never activates
    p.dirichlet_mask = {0};
    p.dims = 1;
    p.m = 1;
    p.maturity = 1.0;
    p.strike = 1.0;
    return p;
}

double fit_order(const std::vector<OrderFit>& fits, const std::string& method,
                 const std::string& quantity) {
    for (const OrderFit& f : fits)
        if (f.method == method && f.quantity == quantity) return f.order;
    return std::numeric_limits<double>::quiet_NaN();
}

double find_error(const ErrorReport& rep, const std::string& method, int n,
                  const std::string& quantity) {
    for (const ErrorRow& r : rep.rows)
        if (r.method == method && r.n_steps == n && r.quantity == quantity) return r.error;
    return std::numeric_limits<double>::quiet_NaN();
}

double min_margin(const std::vector<double>& u, const std::vector<double>& u0) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::min(m, u[i] - u0[i]);
    return m;
}

std::vector<StepperSpec> specs_1d(std::initializer_list<const char*> names) {
    std::vector<StepperSpec> out;
    for (const char* n : names)
        out.push_back(StepperSpec::parse(n, 10, TemporalGridKind::Quadratic, 2));
    return out;
}

}  // namespace

namespace {

int run_gate(const std::filesystem::path& work) {
    std::filesystem::create_directories(work / "cache");
    const std::string cache = (work / "cache").string();
    const double strike = kParams1.strike;

    Gate gate;
    std::vector<double> margins;  // min(u - u0) of every completed solve
    bool all_runs_ok = true;
    auto collect = [&](const ErrorReport& rep) {
        for (const RunSummary& run : rep.runs) {
            if (run.succeeded)
                margins.push_back(run.min_constraint_margin);
            else
                all_runs_ok = false;
        }
    };

    // ---- criterion 1: the penalty steppers reduce to the advertised
    // stability functions when the constraint is inactive
    {
        const double kDirka = 1.0 - 0.5 * std::sqrt(2.0);
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> zdist(-6.0, -0.05);
        const double dt = 0.25;
        double worst = 0.0;
        PenaltyConfig pen;
        for (int k = 0; k < 100; ++k) {
            double z = zdist(rng);
            DiscreteProblem p = scalar_problem(z / dt);
            std::complex<double> zc(z, 0.0);

            auto record = [&](double got, Scheme scheme, double theta) {
                double expect = stability_function(scheme, theta, zc).real();
                double err = std::abs(got - expect) / std::max(1.0, std::abs(expect));
                worst = std::max(worst, err);
            };
            for (double theta : {1.0, 0.5}) {
                StepResult r = step_theta_p(p, {1.0}, dt, theta, pen);
                record(r.u[0], Scheme::ThetaP, theta);
            }
            for (double theta : {kDirka, 1.0 / 3.0}) {
                StepResult r = step_dirk_p(p, {1.0}, dt, theta, pen);
                record(r.u[0], Scheme::DirkP, theta);
            }
            StepResult r = step_lobatto_p(p, {1.0}, dt, pen);
            record(r.u[0], Scheme::LobattoP, 0.0);
        }

        std::complex<double> zero(0.0, 0.0), stiff(-1e8, 0.0);
        double at0 = 0.0;
        at0 = std::max(at0, std::abs(stability_function(Scheme::ThetaP, 1.0, zero) - 1.0));
        at0 = std::max(at0, std::abs(stability_function(Scheme::ThetaP, 0.5, zero) - 1.0));
        at0 = std::max(at0, std::abs(stability_function(Scheme::DirkP, kDirka, zero) - 1.0));
        at0 = std::max(at0, std::abs(stability_function(Scheme::DirkP, 1.0 / 3.0, zero) - 1.0));
        at0 = std::max(at0, std::abs(stability_function(Scheme::LobattoP, 0.0, zero) - 1.0));

        double limit_err = 0.0;
        limit_err = std::max(limit_err, std::abs(stability_function(Scheme::ThetaP, 1.0, stiff)));
        limit_err =
            std::max(limit_err, std::abs(stability_function(Scheme::ThetaP, 0.5, stiff) + 1.0));
        limit_err =
            std::max(limit_err, std::abs(stability_function(Scheme::DirkP, kDirka, stiff)));
        limit_err = std::max(limit_err,
                             std::abs(stability_function(Scheme::DirkP, 1.0 / 3.0, stiff) + 0.5));
        limit_err =
            std::max(limit_err, std::abs(stability_function(Scheme::LobattoP, 0.0, stiff)));

        bool pass = worst <= 1e-12 && at0 <= 1e-15 && limit_err <= 1e-6;
        gate.report(1, "stability identities of the five steppers",
                    pass,
                    "max step deviation " + fmt(worst) + ", stiff-limit deviation " +
                        fmt(limit_err));
    }

    // shared 1D machinery
    ReferenceSolution ref200 = build_reference_1d(kParams1, 200, cache, 2000);
    ReferenceSolution ref100 = build_reference_1d(kParams1, 100, cache, 2000);
    SpatialGrid grid200 = build_grid(200, strike, kParams1.s_max);
    DiscreteProblem prob200 = assemble_1d(kParams1, grid200);
    const RegionOfInterest roi1 = RegionOfInterest::default_1d(strike);

    SweepConfig base1;
    base1.methods = specs_1d({"be", "cn", "dirka", "dirkb", "lobatto"});
    base1.n_values = {10, 20, 40, 80};
    base1.roi = roi1;

    SweepConfig quad = base1;
    quad.grid_kind = TemporalGridKind::Quadratic;
    ErrorReport rep_quad = convergence_sweep_1d(kParams1, 200, quad, ref200);
    collect(rep_quad);
    std::vector<OrderFit> fits_quad = fit_orders(rep_quad);

    // ---- criterion 2: temporal orders on the quadratic grid
    {
        double be_v = fit_order(fits_quad, "be", "value");
        bool pass = near(be_v, 1.0, 0.15);
        std::ostringstream detail;
        detail << "be value " << fmt(be_v);
        for (const char* m : {"dirka", "dirkb", "lobatto"}) {
            detail << "; " << m;
            for (const char* q : {"value", "delta", "gamma"}) {
                double o = fit_order(fits_quad, m, q);
                pass = pass && near(o, 2.0, 0.25);
                detail << " " << fmt(o);
            }
        }
        gate.report(2, "quadratic-grid temporal orders", pass, detail.str());
    }

    // ---- criterion 3: uniform-grid order reduction, quadratic never worse
    SweepConfig uni = base1;
    uni.grid_kind = TemporalGridKind::Uniform;
    ErrorReport rep_uni = convergence_sweep_1d(kParams1, 200, uni, ref200);
    collect(rep_uni);
    {
        std::vector<OrderFit> fits_uni = fit_orders(rep_uni);
        double be_v = fit_order(fits_uni, "be", "value");
        bool pass = near(be_v, 1.0, 0.15);
        std::ostringstream detail;
        detail << "be value " << fmt(be_v);
        for (const char* m : {"cn", "dirka", "dirkb", "lobatto"}) {
            double o = fit_order(fits_uni, m, "value");
            pass = pass && near(o, 1.5, 0.2);
            detail << "; " << m << " value " << fmt(o);
        }
        bool never_worse = true;
        for (const char* m : {"cn", "dirka", "dirkb", "lobatto"})
            for (int n : base1.n_values) {
                double q = find_error(rep_quad, m, n, "value");
                double u = find_error(rep_uni, m, n, "value");
                if (!(q <= u * (1.0 + 1e-12))) never_worse = false;
            }
        pass = pass && never_worse;
        if (!never_worse) detail << "; quadratic beaten by uniform somewhere";
        gate.report(3, "uniform-grid order reduction to 1.5", pass, detail.str());
    }

    // ---- criterion 4: the Crank-Nicolson gamma pathology and its resolution
    {
        SweepConfig fine = base1;
        fine.methods = specs_1d({"cn", "dirka"});
        fine.n_values.clear();
        for (int n = 10; n <= 40; ++n) fine.n_values.push_back(n);
        fine.grid_kind = TemporalGridKind::Quadratic;
        ErrorReport rep_fine = convergence_sweep_1d(kParams1, 200, fine, ref200);
        collect(rep_fine);

        double cn_max = 0.0, dirka_max = 0.0;
        for (int n = 10; n <= 40; ++n) {
            cn_max = std::max(cn_max, find_error(rep_fine, "cn", n, "gamma"));
            dirka_max = std::max(dirka_max, find_error(rep_fine, "dirka", n, "gamma"));
        }

        SweepConfig high = base1;
        high.methods = specs_1d({"cn"});
        high.n_values = {50, 63, 80, 100};
        high.grid_kind = TemporalGridKind::Quadratic;
        ErrorReport rep_high = convergence_sweep_1d(kParams1, 200, high, ref200);
        collect(rep_high);
        std::vector<std::pair<int, double>> pairs;
        for (int n : high.n_values) pairs.push_back({n, find_error(rep_high, "cn", n, "gamma")});
        double cn_high_order = estimate_order(pairs);

        bool pass = std::isfinite(cn_max) && std::isfinite(dirka_max) &&
                    cn_max >= 5.0 * dirka_max && cn_high_order >= 1.8;
        gate.report(4, "cn gamma error spike at moderate N, second order restored later", pass,
                    "cn max " + fmt(cn_max) + " vs dirka max " + fmt(dirka_max) +
                        ", cn order at high N " + fmt(cn_high_order));
    }

    // ---- criterion 5: temporal errors are nearly independent of the spatial grid
    {
        SweepConfig small = base1;
        small.methods = specs_1d({"be", "dirka"});
        small.n_values = {40};
        small.grid_kind = TemporalGridKind::Quadratic;
        ErrorReport rep_small = convergence_sweep_1d(kParams1, 100, small, ref100);
        collect(rep_small);

        bool pass = true;
        std::ostringstream detail;
        for (const char* m : {"be", "dirka"}) {
            double e100 = find_error(rep_small, m, 40, "value");
            double e200 = find_error(rep_quad, m, 40, "value");
            double ratio = e100 / e200;
            pass = pass && std::isfinite(ratio) && ratio >= 0.5 && ratio <= 2.0;
            detail << (m == std::string("be") ? "" : "; ") << m << " m100/m200 " << fmt(ratio);
        }
        gate.report(5, "value error at N=40 stable across m=100 and m=200", pass, detail.str());
    }

    // ---- criterion 6: penalty solutions match the direct LCP solutions
    {
        double worst = 0.0;
        for (const char* name : {"cn", "dirka", "dirkb"}) {
            StepperSpec spec = StepperSpec::parse(name, 100, TemporalGridKind::Quadratic, 2);
            SolveResult pen = solve_pdcp(prob200, spec, PenaltyConfig{});
            DirectSolveResult direct = solve_pdcp_direct_1d(prob200, spec);
            margins.push_back(min_margin(pen.u, prob200.u0));
            for (std::size_t i = 0; i < grid200.m; ++i) {
                if (!roi1.contains(grid200.points[i])) continue;
                double d = std::abs(pen.u[i] - direct.u[i]) /
                           std::max(1.0, std::abs(direct.u[i]));
                worst = std::max(worst, d);
            }
        }
        gate.report(6, "penalty vs direct LCP solve at N=100", worst <= 1e-4,
                    "worst roi deviation " + fmt(worst));
    }

    // ---- criterion 9 runs double as margin sources, do them before 7
    double anchor_detail_1d, anchor_detail_2d;
    bool anchor_pass_1d, anchor_pass_2d;
    {
        double crr = oracles::binomial_put(100.0, strike, kParams1.r, kParams1.sigma,
                                           kParams1.maturity, 50000, true);
        StepperSpec spec = StepperSpec::dirka(100, TemporalGridKind::Quadratic, 2);
        SolveResult res = solve_pdcp(prob200, spec, PenaltyConfig{});
        margins.push_back(min_margin(res.u, prob200.u0));
        double ours = interpolate_1d(grid200, res.u, strike);
        anchor_detail_1d = std::abs(ours - crr) / crr;
        anchor_pass_1d = anchor_detail_1d <= 0.005;
    }
    SpatialGrid grid2d = build_grid(100, strike, kParams2.s_max);
    DiscreteProblem prob2d = assemble_2d(kParams2, grid2d);
    {
        double lattice = oracles::lattice_american_put_on_average(
            100.0, 100.0, strike, kParams2.r, kParams2.sigma1, kParams2.sigma2, kParams2.rho,
            kParams2.maturity, 2000);
        StepperSpec spec = StepperSpec::dirka(100, TemporalGridKind::Quadratic, 0);
        SolveResult res = solve_pdcp(prob2d, spec, PenaltyConfig{});
        margins.push_back(min_margin(res.u, prob2d.u0));
        double ours = interpolate_2d(grid2d, grid2d, res.u, strike, strike);
        anchor_detail_2d = std::abs(ours - lattice) / lattice;
        anchor_pass_2d = anchor_detail_2d <= 0.01;
    }

    // ---- criterion 10 sweep feeds margins too
    ReferenceSolution ref2d = build_reference_2d(kParams2, 100, cache, 500);
    SweepConfig cfg2;
    cfg2.methods = {StepperSpec::be(10, TemporalGridKind::Quadratic, 2),
                    StepperSpec::dirka(10, TemporalGridKind::Quadratic, 0),
                    StepperSpec::dirkb(10, TemporalGridKind::Quadratic, 0)};
    cfg2.n_values = {10, 20, 40, 80};
    cfg2.grid_kind = TemporalGridKind::Quadratic;
    cfg2.roi = RegionOfInterest::default_2d(strike);
    ErrorReport rep2d = convergence_sweep_2d(kParams2, 100, cfg2, ref2d);
    collect(rep2d);

    // ---- criterion 7: every computed solution respects the constraint
    {
        double worst = margins.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : *std::min_element(margins.begin(), margins.end());
        bool pass = all_runs_ok && std::isfinite(worst) && worst >= -1e-4 * strike &&
                    ref200.max_complementarity_residual <= 1e-9 * strike &&
                    ref100.max_complementarity_residual <= 1e-9 * strike;
        gate.report(7, "constraint margins and reference complementarity", pass,
                    "worst margin " + fmt(worst) + " over " + fmt(double(margins.size())) +
                        " solves, reference residual " +
                        fmt(ref200.max_complementarity_residual));
    }

    // ---- criterion 8: location of the early exercise boundary
    {
        double tol = 1e-8 * strike;
        double boundary = 0.0;
        for (std::size_t i = 0; i < grid200.m; ++i) {
            if (grid200.points[i] >= strike) break;
            if (ref200.u[i] - prob200.u0[i] <= tol) boundary = grid200.points[i];
        }
        bool pass = boundary >= 57.0 && boundary <= 59.0;
        gate.report(8, "early exercise boundary at maturity", pass,
                    "largest contact node s = " + fmt(boundary));
    }

    gate.report(9, "price anchors against the binomial oracles",
                anchor_pass_1d && anchor_pass_2d,
                "1d rel dev " + fmt(anchor_detail_1d) + ", 2d rel dev " +
                    fmt(anchor_detail_2d));

    // ---- criterion 10: 2D temporal orders
    {
        std::vector<OrderFit> fits2 = fit_orders(rep2d);
        double be_v = fit_order(fits2, "be", "value");
        bool pass = near(be_v, 1.0, 0.15);
        std::ostringstream detail;
        detail << "be value " << fmt(be_v) << "; dirka";
        for (const char* q : {"value", "delta1", "delta2", "gamma11", "gamma12", "gamma22"}) {
            double o = fit_order(fits2, "dirka", q);
            pass = pass && near(o, 2.0, 0.25);
            detail << " " << fmt(o);
        }
        detail << "; dirkb";
        for (const char* q : {"value", "delta1", "delta2"}) {
            double o = fit_order(fits2, "dirkb", q);
            pass = pass && near(o, 2.0, 0.25);
            detail << " " << fmt(o);
        }
        // dirkb gammas need the asymptotic range, N=10 is preasymptotic
        for (const char* q : {"gamma11", "gamma12", "gamma22"}) {
            std::vector<std::pair<int, double>> pairs;
            for (int n : {20, 40, 80}) pairs.push_back({n, find_error(rep2d, "dirkb", n, q)});
            double o = estimate_order(pairs);
            pass = pass && near(o, 2.0, 0.25);
            detail << " " << fmt(o);
        }
        gate.report(10, "2d temporal orders against the fine reference", pass, detail.str());
    }

    // ---- criterion 11: repeated sweeps serialize byte-identically
    {
        SweepConfig cfg = base1;
        cfg.methods = specs_1d({"be", "dirka"});
        cfg.n_values = {10, 20, 40};
        cfg.grid_kind = TemporalGridKind::Quadratic;

        auto serialize = [&]() {
            ErrorReport rep = convergence_sweep_1d(kParams1, 100, cfg, ref100);
            std::ostringstream errors, orders, traces;
            write_error_rows_csv(errors, rep.rows);
            write_order_fits_csv(orders, fit_orders(rep));
            write_traces_csv(traces, rep.runs);
            return errors.str() + "\x1e" + orders.str() + "\x1e" + traces.str();
        };
        std::string a = serialize(), b = serialize();
        gate.report(11, "repeated runs produce byte-identical artifacts", a == b,
                    a == b ? "errors, orders and traces all match"
                           : "artifacts differ between identical runs");
    }

    std::cout << (gate.failures == 0 ? "acceptance: all criteria passed"
                                     : "acceptance: " + std::to_string(gate.failures) +
                                           " criterion(s) failed")
              << std::endl;
    return gate.failures;
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path work = argc > 1 ? std::filesystem::path(argv[1])
                                          : std::filesystem::path("acceptance_work");
    try {
        return run_gate(work);
    } catch (const std::exception& e) {
        std::cout << "[FAIL] acceptance aborted: " << e.what() << std::endl;
        return 99;
    }
}
