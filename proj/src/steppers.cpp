#include "pdcp/steppers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pdcp {

TemporalGrid make_temporal_grid(int n_steps, double maturity, TemporalGridKind kind) {
    if (n_steps < 1) throw std::invalid_argument("make_temporal_grid: need at least one step");
    if (!(maturity > 0.0)) throw std::invalid_argument("make_temporal_grid: maturity must be > 0");
    TemporalGrid g;
    g.times.resize(n_steps + 1);
    double n_d = static_cast<double>(n_steps);
    for (int n = 0; n <= n_steps; ++n) {
        double f = static_cast<double>(n) / n_d;
        g.times[n] = kind == TemporalGridKind::Uniform ? f * maturity : f * f * maturity;
    }
    g.times[0] = 0.0;
    g.times[n_steps] = maturity;
    return g;
}

void StepperSpec::validate() const {
    if (n_steps < 1) throw std::invalid_argument("StepperSpec: n_steps must be >= 1");
    if (damping_steps < 0) throw std::invalid_argument("StepperSpec: damping_steps must be >= 0");
    if (scheme != Scheme::LobattoP && !(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("StepperSpec: theta must lie in (0, 1]");
    if (name.empty()) throw std::invalid_argument("StepperSpec: empty name");
}

StepperSpec StepperSpec::be(int n, TemporalGridKind kind, int damping) {
    return {Scheme::ThetaP, 1.0, damping, kind, n, "be"};
}
StepperSpec StepperSpec::cn(int n, TemporalGridKind kind, int damping) {
    return {Scheme::ThetaP, 0.5, damping, kind, n, "cn"};
}
StepperSpec StepperSpec::dirka(int n, TemporalGridKind kind, int damping) {
    return {Scheme::DirkP, 1.0 - 0.5 * std::sqrt(2.0), damping, kind, n, "dirka"};
}
StepperSpec StepperSpec::dirkb(int n, TemporalGridKind kind, int damping) {
    return {Scheme::DirkP, 1.0 / 3.0, damping, kind, n, "dirkb"};
}
StepperSpec StepperSpec::lobatto(int n, TemporalGridKind kind, int damping) {
    return {Scheme::LobattoP, 0.0, damping, kind, n, "lobatto"};
}

StepperSpec StepperSpec::parse(const std::string& method_name, int n_steps, TemporalGridKind kind,
                               int damping_steps) {
    if (method_name == "be") return be(n_steps, kind, damping_steps);
    if (method_name == "cn") return cn(n_steps, kind, damping_steps);
    if (method_name == "dirka") return dirka(n_steps, kind, damping_steps);
    if (method_name == "dirkb") return dirkb(n_steps, kind, damping_steps);
    if (method_name == "lobatto") return lobatto(n_steps, kind, damping_steps);
    throw std::invalid_argument("unknown method '" + method_name +
                                "' (expected be, cn, dirka, dirkb, or lobatto)");
}

void PenaltyConfig::validate() const {
    if (!(large > 0.0)) throw std::invalid_argument("PenaltyConfig: large must be > 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("PenaltyConfig: tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("PenaltyConfig: max_iterations must be >= 1");
}

std::vector<double> penalty_diag(const std::vector<double>& y, const std::vector<double>& u0,
                                 double large) {
    if (y.size() != u0.size()) throw std::invalid_argument("penalty_diag: size mismatch");
    std::vector<double> p(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) p[i] = y[i] < u0[i] ? large : 0.0;
    return p;
}

namespace {

double scaled_displacement(const std::vector<double>& y_new, const std::vector<double>& y_old) {
    double d = 0.0;
    for (std::size_t i = 0; i < y_new.size(); ++i)
        d = std::max(d, std::abs(y_new[i] - y_old[i]) / std::max(1.0, std::abs(y_new[i])));
    return d;
}

struct StageOutcome {
    std::vector<double> y;
    int kappa = 0;
    long linear_iterations = 0;
};

// Shared machinery for the implicit stage systems (I - coeff*A + P) y = rhs.
// One-dimensional problems go through the Thomas algorithm; everything else
// through ILU(0)-preconditioned BiCGSTAB, refactored whenever the penalty
// diagonal changes.
class StageSolver {
  public:
    explicit StageSolver(const DiscreteProblem& problem)
        : prob_(problem), direct_(problem.dims == 1) {
        if (direct_) {
            tri_a_ = to_tridiagonal(problem.a);
        } else {
            build_template();
        }
    }

    const DiscreteProblem& problem() const { return prob_; }

    StageOutcome solve_stage(double coeff, const std::vector<double>& rhs_base,
                             const std::vector<double>& u_prev, const PenaltyConfig& penalty,
                             int time_step, const char* stage_label) {
        std::size_t n = prob_.size();
        StageOutcome out;
        out.y = u_prev;
        std::vector<double> pen = penalty_diag(out.y, prob_.u0, penalty.large);
        std::vector<double> rhs(n), y_next;

        for (int k = 1; k <= penalty.max_iterations; ++k) {
            for (std::size_t i = 0; i < n; ++i) rhs[i] = rhs_base[i] + pen[i] * prob_.u0[i];
            if (direct_) {
                y_next = solve_direct(coeff, pen, rhs);
            } else {
                y_next = solve_krylov(coeff, pen, rhs, k == 1 ? u_prev : empty_, out,
                                      time_step, stage_label, k);
            }
            std::vector<double> pen_next = penalty_diag(y_next, prob_.u0, penalty.large);
            bool stable_pattern = pen_next == pen;
            bool small_move = scaled_displacement(y_next, out.y) < penalty.tolerance;
            out.y = std::move(y_next);
            pen = std::move(pen_next);
            out.kappa = k;
            if (small_move || stable_pattern) return out;
        }
        throw PenaltyIterationError("time step " + std::to_string(time_step) + ", " + stage_label +
                                        ": penalty iteration did not settle within " +
                                        std::to_string(penalty.max_iterations) + " iterations",
                                    time_step, penalty.max_iterations);
    }

  private:
    std::vector<double> solve_direct(double coeff, const std::vector<double>& pen,
                                     const std::vector<double>& rhs) {
        std::size_t n = prob_.size();
        TridiagonalMatrix b;
        b.diag.resize(n);
        b.lower.resize(n - 1);
        b.upper.resize(n - 1);
        for (std::size_t i = 0; i < n; ++i) b.diag[i] = 1.0 - coeff * tri_a_.diag[i] + pen[i];
        for (std::size_t i = 0; i + 1 < n; ++i) {
            b.lower[i] = -coeff * tri_a_.lower[i];
            b.upper[i] = -coeff * tri_a_.upper[i];
        }
        return solve_tridiagonal(b, rhs);
    }

    std::vector<double> solve_krylov(double coeff, const std::vector<double>& pen,
                                     const std::vector<double>& rhs,
                                     const std::vector<double>& guess, StageOutcome& out,
                                     int time_step, const char* stage_label, int k) {
        for (std::size_t t = 0; t < b_.vals.size(); ++t) b_.vals[t] = -coeff * a_diag_.vals[t];
        for (std::size_t l = 0; l < prob_.size(); ++l) b_.vals[diag_pos_[l]] += 1.0 + pen[l];

        // Penalized rows dwarf the rest of the system; equilibrate so the
        // Krylov residual test controls the absolute error everywhere.
        std::vector<double> scaled_rhs = rhs;
        equilibrate_rows(b_, scaled_rhs);
        Ilu0Factors ilu = ilu0_factor(b_);
        auto [y, report] = bicgstab(b_, scaled_rhs, guess, &ilu, BicgstabOptions{});
        out.linear_iterations += report.iterations;
        if (!report.converged)
            throw SolveError("time step " + std::to_string(time_step) + ", " + stage_label +
                             ", penalty iteration " + std::to_string(k) +
                             ": bicgstab stalled at relative residual " +
                             std::to_string(report.relative_residual));
        return y;
    }

    // A copy of the operator pattern with every diagonal entry stored
    // explicitly, so the stage matrix can be refilled in place.
    void build_template() {
        const SparseMatrix& a = prob_.a;
        std::size_t n = a.n;
        std::vector<std::vector<std::pair<int, double>>> rows(n);
        for (std::size_t l = 0; l < n; ++l) {
            bool seen_diag = false;
            for (int idx = a.row_ptr[l]; idx < a.row_ptr[l + 1]; ++idx) {
                int j = a.cols[idx];
                if (!seen_diag && j > static_cast<int>(l)) {
                    rows[l].emplace_back(static_cast<int>(l), 0.0);
                    seen_diag = true;
                }
                if (j == static_cast<int>(l)) seen_diag = true;
                rows[l].emplace_back(j, a.vals[idx]);
            }
            if (!seen_diag) rows[l].emplace_back(static_cast<int>(l), 0.0);
        }
        a_diag_ = SparseMatrix::from_rows(n, rows);
        b_ = a_diag_;
        diag_pos_.resize(n);
        for (std::size_t l = 0; l < n; ++l) {
            diag_pos_[l] = -1;
            for (int idx = a_diag_.row_ptr[l]; idx < a_diag_.row_ptr[l + 1]; ++idx)
                if (a_diag_.cols[idx] == static_cast<int>(l)) diag_pos_[l] = idx;
        }
    }

    const DiscreteProblem& prob_;
    bool direct_;
    TridiagonalMatrix tri_a_;
    SparseMatrix a_diag_;
    SparseMatrix b_;
    std::vector<int> diag_pos_;
    const std::vector<double> empty_;
};

StepResult theta_step_impl(StageSolver& solver, const std::vector<double>& u_prev, double dt,
                           double theta, const PenaltyConfig& penalty, int time_step) {
    const DiscreteProblem& p = solver.problem();
    std::vector<double> rhs_base;
    if (theta == 1.0) {
        rhs_base = u_prev;
    } else {
        rhs_base = p.a.multiply(u_prev);
        for (std::size_t i = 0; i < rhs_base.size(); ++i)
            rhs_base[i] = u_prev[i] + (1.0 - theta) * dt * rhs_base[i];
    }
    StageOutcome s = solver.solve_stage(theta * dt, rhs_base, u_prev, penalty, time_step, "stage 1");
    return {std::move(s.y), s.kappa, 0, s.linear_iterations};
}

StepResult dirk_step_impl(StageSolver& solver, const std::vector<double>& u_prev, double dt,
                          double theta, const PenaltyConfig& penalty, int time_step) {
    const DiscreteProblem& p = solver.problem();
    std::size_t n = p.size();
    std::vector<double> a_u = p.a.multiply(u_prev);

    std::vector<double> rhs1(n);
    for (std::size_t i = 0; i < n; ++i) rhs1[i] = u_prev[i] + (1.0 - theta) * dt * a_u[i];
    StageOutcome s1 = solver.solve_stage(theta * dt, rhs1, u_prev, penalty, time_step, "stage 1");

    std::vector<double> a_y = p.a.multiply(s1.y);
    std::vector<double> rhs2(n);
    for (std::size_t i = 0; i < n; ++i)
        rhs2[i] = u_prev[i] + 0.5 * dt * a_u[i] + (0.5 - theta) * dt * a_y[i];
    StageOutcome s2 = solver.solve_stage(theta * dt, rhs2, u_prev, penalty, time_step, "stage 2");

    return {std::move(s2.y), s1.kappa, s2.kappa, s1.linear_iterations + s2.linear_iterations};
}

StepResult lobatto_step_impl(const DiscreteProblem& p, const std::vector<double>& u_prev,
                             double dt, const PenaltyConfig& penalty, int time_step) {
    std::size_t n = p.size();
    std::vector<double> y = u_prev, z = u_prev;
    std::vector<double> pen_y = penalty_diag(y, p.u0, penalty.large);
    std::vector<double> pen_z = penalty_diag(z, p.u0, penalty.large);

    std::vector<double> rhs(2 * n);
    std::vector<double> first_guess(2 * n);
    std::copy(u_prev.begin(), u_prev.end(), first_guess.begin());
    std::copy(u_prev.begin(), u_prev.end(), first_guess.begin() + n);

    StepResult out;
    for (int k = 1; k <= penalty.max_iterations; ++k) {
        SparseMatrix block = assemble_lobatto_block(p.a, dt, pen_y, pen_z);
        for (std::size_t l = 0; l < n; ++l) {
            rhs[l] = u_prev[l] + (pen_y[l] - pen_z[l]) * p.u0[l];
            rhs[n + l] = u_prev[l] + (pen_y[l] + pen_z[l]) * p.u0[l];
        }
        equilibrate_rows(block, rhs);
        Ilu0Factors ilu = ilu0_factor(block);
        auto [w, report] =
            bicgstab(block, rhs, k == 1 ? first_guess : std::vector<double>{}, &ilu,
                     BicgstabOptions{});
        out.linear_iterations += report.iterations;
        if (!report.converged)
            throw SolveError("time step " + std::to_string(time_step) + ", coupled stages, " +
                             "penalty iteration " + std::to_string(k) +
                             ": bicgstab stalled at relative residual " +
                             std::to_string(report.relative_residual));

        std::vector<double> y_next(w.begin(), w.begin() + n);
        std::vector<double> z_next(w.begin() + n, w.end());
        std::vector<double> pen_y_next = penalty_diag(y_next, p.u0, penalty.large);
        std::vector<double> pen_z_next = penalty_diag(z_next, p.u0, penalty.large);

        bool stable_pattern = pen_y_next == pen_y && pen_z_next == pen_z;
        bool small_move = scaled_displacement(z_next, z) < penalty.tolerance;
        y = std::move(y_next);
        z = std::move(z_next);
        pen_y = std::move(pen_y_next);
        pen_z = std::move(pen_z_next);
        out.kappa1 = k;
        if (small_move || stable_pattern) {
            out.u = std::move(z);
            return out;
        }
    }
    throw PenaltyIterationError("time step " + std::to_string(time_step) +
                                    ", coupled stages: penalty iteration did not settle within " +
                                    std::to_string(penalty.max_iterations) + " iterations",
                                time_step, penalty.max_iterations);
}

void check_problem(const DiscreteProblem& problem) {
    if (problem.size() == 0 || problem.a.n != problem.size())
        throw std::invalid_argument("DiscreteProblem: inconsistent sizes");
    if (!(problem.maturity > 0.0))
        throw std::invalid_argument("DiscreteProblem: maturity must be > 0");
}

}  // namespace

StepResult step_theta_p(const DiscreteProblem& problem, const std::vector<double>& u_prev,
                        double dt, double theta, const PenaltyConfig& penalty, int time_step) {
    check_problem(problem);
    penalty.validate();
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("step_theta_p: theta must lie in (0, 1]");
    if (!(dt > 0.0)) throw std::invalid_argument("step_theta_p: dt must be > 0");
    StageSolver solver(problem);
    return theta_step_impl(solver, u_prev, dt, theta, penalty, time_step);
}

StepResult step_dirk_p(const DiscreteProblem& problem, const std::vector<double>& u_prev,
                       double dt, double theta, const PenaltyConfig& penalty, int time_step) {
    check_problem(problem);
    penalty.validate();
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("step_dirk_p: theta must lie in (0, 1]");
    if (!(dt > 0.0)) throw std::invalid_argument("step_dirk_p: dt must be > 0");
    StageSolver solver(problem);
    return dirk_step_impl(solver, u_prev, dt, theta, penalty, time_step);
}

StepResult step_lobatto_p(const DiscreteProblem& problem, const std::vector<double>& u_prev,
                          double dt, const PenaltyConfig& penalty, int time_step) {
    check_problem(problem);
    penalty.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("step_lobatto_p: dt must be > 0");
    return lobatto_step_impl(problem, u_prev, dt, penalty, time_step);
}

SolveResult solve_pdcp(const DiscreteProblem& problem, const StepperSpec& spec,
                       const PenaltyConfig& penalty) {
    check_problem(problem);
    spec.validate();
    penalty.validate();

    TemporalGrid grid = make_temporal_grid(spec.n_steps, problem.maturity, spec.grid_kind);
    StageSolver solver(problem);

    SolveResult result;
    result.u = problem.u0;
    result.traces.reserve(spec.n_steps);
    for (int n = 1; n <= spec.n_steps; ++n) {
        double dt = grid.times[n] - grid.times[n - 1];
        StepResult step;
        if (n <= spec.damping_steps) {
            step = theta_step_impl(solver, result.u, dt, 1.0, penalty, n);
        } else {
            switch (spec.scheme) {
                case Scheme::ThetaP:
                    step = theta_step_impl(solver, result.u, dt, spec.theta, penalty, n);
                    break;
                case Scheme::DirkP:
                    step = dirk_step_impl(solver, result.u, dt, spec.theta, penalty, n);
                    break;
                case Scheme::LobattoP:
                    step = lobatto_step_impl(problem, result.u, dt, penalty, n);
                    break;
            }
        }
        result.traces.push_back({n, dt, step.kappa1, step.kappa2, step.linear_iterations});
        result.u = std::move(step.u);
    }
    return result;
}

std::complex<double> stability_function(Scheme scheme, double theta, std::complex<double> z) {
    std::complex<double> one(1.0, 0.0);
    switch (scheme) {
        case Scheme::ThetaP: {
            std::complex<double> den = one - theta * z;
            if (std::abs(den) == 0.0) throw std::domain_error("stability_function: pole");
            return (one + (1.0 - theta) * z) / den;
        }
        case Scheme::DirkP: {
            std::complex<double> den = one - theta * z;
            if (std::abs(den) == 0.0) throw std::domain_error("stability_function: pole");
            std::complex<double> num =
                one + (1.0 - 2.0 * theta) * z + (0.5 - 2.0 * theta + theta * theta) * z * z;
            return num / (den * den);
        }
        case Scheme::LobattoP: {
            std::complex<double> den = one - z + 0.5 * z * z;
            if (std::abs(den) == 0.0) throw std::domain_error("stability_function: pole");
            return one / den;
        }
    }
    throw std::logic_error("stability_function: unknown scheme");
}

}  // namespace pdcp
