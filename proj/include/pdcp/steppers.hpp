#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pdcp/discrete_operator.hpp"

namespace pdcp {

enum class TemporalGridKind { Uniform, Quadratic };

/// Partition 0 = t_0 < ... < t_N = maturity. Uniform: t_n = n*T/N.
/// Quadratic: t_n = (n/N)^2 * T, concentrating steps near the payoff kink at
/// t = 0 where the solution is least regular.
struct TemporalGrid {
    std::vector<double> times;  // N+1 entries

    int steps() const { return static_cast<int>(times.size()) - 1; }
};

TemporalGrid make_temporal_grid(int n_steps, double maturity, TemporalGridKind kind);

enum class Scheme { ThetaP, DirkP, LobattoP };

/// Time-stepping method adapted to the complementarity problem by penalty.
/// Presets:
///   be      theta-method, theta = 1        (order 1, L-stable)
///   cn      theta-method, theta = 1/2      (order 2, A-stable)
///   dirka   two-stage DIRK, theta = 1-sqrt(2)/2  (order 2, L-stable)
///   dirkb   two-stage DIRK, theta = 1/3    (order 2, strongly A-stable)
///   lobatto two-stage Lobatto IIIC-like pair (order 2, L-stable)
/// damping_steps initial steps are replaced by backward Euler to damp the
/// nonsmooth initial data.
struct StepperSpec {
    Scheme scheme = Scheme::ThetaP;
    double theta = 1.0;   // ignored by Scheme::LobattoP
    int damping_steps = 0;
    TemporalGridKind grid_kind = TemporalGridKind::Quadratic;
    int n_steps = 1;
    std::string name = "be";

    void validate() const;

    static StepperSpec be(int n_steps, TemporalGridKind kind, int damping_steps);
    static StepperSpec cn(int n_steps, TemporalGridKind kind, int damping_steps);
    static StepperSpec dirka(int n_steps, TemporalGridKind kind, int damping_steps);
    static StepperSpec dirkb(int n_steps, TemporalGridKind kind, int damping_steps);
    static StepperSpec lobatto(int n_steps, TemporalGridKind kind, int damping_steps);

    /// Accepts the preset names above; throws std::invalid_argument otherwise.
    static StepperSpec parse(const std::string& method_name, int n_steps,
                             TemporalGridKind kind, int damping_steps);
};

struct PenaltyConfig {
    double large = 1e7;       // penalty weight
    double tolerance = 1e-7;  // on the scaled iterate displacement
    int max_iterations = 100;

    void validate() const;
};

/// Thrown when the penalty iteration hits max_iterations without meeting the
/// stopping criterion.
struct PenaltyIterationError : SolveError {
    PenaltyIterationError(const std::string& what, int time_step_, int iterations_)
        : SolveError(what), time_step(time_step_), iterations(iterations_) {}
    int time_step = 0;
    int iterations = 0;
};

/// Diagnostics for one time step. kappa2 is 0 for single-stage schemes and
/// for the coupled Lobatto step. linear_iterations accumulates Krylov
/// iterations over all penalty sub-iterations of the step; direct
/// (tridiagonal) solves contribute 0.
struct StepTrace {
    int step = 0;  // 1-based
    double dt = 0.0;
    int kappa1 = 0;
    int kappa2 = 0;
    long linear_iterations = 0;
};

struct StepResult {
    std::vector<double> u;
    int kappa1 = 0;
    int kappa2 = 0;
    long linear_iterations = 0;
};

struct SolveResult {
    std::vector<double> u;          // approximation at maturity
    std::vector<StepTrace> traces;  // one per time step
};

/// Penalty diagonal: large where y < u0 strictly (the constraint is
/// violated), 0 elsewhere.
std::vector<double> penalty_diag(const std::vector<double>& y, const std::vector<double>& u0,
                                 double large);

/// One theta-method step of length dt from u_prev, constraint handled by the
/// iterated penalty linearization. time_step is only used to label errors.
StepResult step_theta_p(const DiscreteProblem& problem, const std::vector<double>& u_prev,
                        double dt, double theta, const PenaltyConfig& penalty,
                        int time_step = 0);

/// One step of the two-stage DIRK, both stage systems solved by the penalty
/// iteration. Stage one is a theta-step; stage two reuses A u_prev and A of
/// the first-stage result.
StepResult step_dirk_p(const DiscreteProblem& problem, const std::vector<double>& u_prev,
                       double dt, double theta, const PenaltyConfig& penalty, int time_step = 0);

/// One step of the two-stage Lobatto pair. The stages are coupled, so each
/// penalty iteration solves one system of twice the problem size; the second
/// stage is returned. Stops on the displacement of the second-stage iterate
/// or when both stage penalty patterns repeat.
StepResult step_lobatto_p(const DiscreteProblem& problem, const std::vector<double>& u_prev,
                          double dt, const PenaltyConfig& penalty, int time_step = 0);

/// Marches the semidiscrete problem from the cell-averaged payoff to
/// maturity. The first spec.damping_steps steps use backward Euler, the rest
/// the method in spec. Errors from any step are rethrown with the step index
/// attached.
SolveResult solve_pdcp(const DiscreteProblem& problem, const StepperSpec& spec,
                       const PenaltyConfig& penalty);

/// Scalar stability function R(z) of the unconstrained method: the step map
/// y_{n+1} = R(z) y_n for y' = lambda y with z = lambda * dt.
/// Throws std::domain_error at poles.
std::complex<double> stability_function(Scheme scheme, double theta, std::complex<double> z);

}  // namespace pdcp
