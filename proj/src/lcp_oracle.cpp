#include "pdcp/lcp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pdcp {
namespace {

void tridiagonal_multiply(const TridiagonalMatrix& a, const std::vector<double>& x,
                          std::vector<double>& y) {
    std::size_t n = a.n();
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = a.diag[i] * x[i];
        if (i > 0) s += a.lower[i - 1] * x[i - 1];
        if (i + 1 < n) s += a.upper[i] * x[i + 1];
        y[i] = s;
    }
}

double complementarity_residual(const TridiagonalMatrix& m, const std::vector<double>& rhs,
                                const std::vector<double>& g, const std::vector<double>& x) {
    std::vector<double> mx;
    tridiagonal_multiply(m, x, mx);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(std::min(x[i] - g[i], mx[i] - rhs[i])));
    return worst;
}

}  // namespace

std::vector<double> brennan_schwartz_solve(const TridiagonalLcp& lcp) {
    lcp.matrix.validate();
    std::size_t n = lcp.matrix.n();
    if (lcp.rhs.size() != n || lcp.obstacle.size() != n)
        throw std::invalid_argument("brennan_schwartz_solve: size mismatch");

    std::vector<double> d = lcp.matrix.diag;
    std::vector<double> b = lcp.rhs;
    for (std::size_t i = n - 1; i-- > 0;) {
        double piv = d[i + 1];
        if (!(std::abs(piv) > 0.0))
            throw SolveError("brennan_schwartz_solve: zero pivot at row " + std::to_string(i + 1));
        double f = lcp.matrix.upper[i] / piv;
        d[i] -= f * lcp.matrix.lower[i];
        b[i] -= f * b[i + 1];
    }

    std::vector<double> x(n);
    if (!(std::abs(d[0]) > 0.0)) throw SolveError("brennan_schwartz_solve: zero pivot at row 0");
    x[0] = std::max(b[0] / d[0], lcp.obstacle[0]);
    for (std::size_t i = 1; i < n; ++i) {
        if (!(std::abs(d[i]) > 0.0))
            throw SolveError("brennan_schwartz_solve: zero pivot at row " + std::to_string(i));
        x[i] = std::max((b[i] - lcp.matrix.lower[i - 1] * x[i - 1]) / d[i], lcp.obstacle[i]);
    }
    return x;
}

DirectSolveResult solve_pdcp_direct_1d(const DiscreteProblem& problem, const StepperSpec& spec) {
    if (problem.dims != 1)
        throw std::invalid_argument("solve_pdcp_direct_1d: one-dimensional problems only");
    if (spec.scheme == Scheme::LobattoP)
        throw std::invalid_argument(
            "solve_pdcp_direct_1d: coupled stages cannot be solved row-wise; "
            "use the penalty path");
    spec.validate();

    std::size_t n = problem.size();
    TridiagonalMatrix a = to_tridiagonal(problem.a);
    TemporalGrid grid = make_temporal_grid(spec.n_steps, problem.maturity, spec.grid_kind);

    DirectSolveResult result;
    result.u = problem.u0;
    result.traces.reserve(spec.n_steps);

    TridiagonalMatrix m;
    m.diag.resize(n);
    m.lower.resize(n - 1);
    m.upper.resize(n - 1);
    auto build_stage_matrix = [&](double coeff) {
        for (std::size_t i = 0; i < n; ++i) m.diag[i] = 1.0 - coeff * a.diag[i];
        for (std::size_t i = 0; i + 1 < n; ++i) {
            m.lower[i] = -coeff * a.lower[i];
            m.upper[i] = -coeff * a.upper[i];
        }
    };

    std::vector<double> a_u, a_y, rhs(n);
    auto stage_solve = [&](double coeff, const std::vector<double>& stage_rhs) {
        build_stage_matrix(coeff);
        TridiagonalLcp lcp{m, stage_rhs, problem.u0};
        std::vector<double> x = brennan_schwartz_solve(lcp);
        result.max_complementarity_residual =
            std::max(result.max_complementarity_residual,
                     complementarity_residual(m, stage_rhs, problem.u0, x));
        return x;
    };

    for (int step = 1; step <= spec.n_steps; ++step) {
        double dt = grid.times[step] - grid.times[step - 1];
        bool damped = step <= spec.damping_steps;
        double theta = damped ? 1.0 : spec.theta;
        bool dirk_stage2 = !damped && spec.scheme == Scheme::DirkP;

        tridiagonal_multiply(a, result.u, a_u);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = result.u[i] + (1.0 - theta) * dt * a_u[i];
        std::vector<double> y = stage_solve(theta * dt, rhs);

        if (dirk_stage2) {
            tridiagonal_multiply(a, y, a_y);
            for (std::size_t i = 0; i < n; ++i)
                rhs[i] = result.u[i] + 0.5 * dt * a_u[i] + (0.5 - theta) * dt * a_y[i];
            y = stage_solve(theta * dt, rhs);
        }

        result.traces.push_back({step, dt, 1, dirk_stage2 ? 1 : 0, 0});
        result.u = std::move(y);
    }
    return result;
}

}  // namespace pdcp
