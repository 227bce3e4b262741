#pragma once

#include <vector>

#include "pdcp/linear_solvers.hpp"
#include "pdcp/steppers.hpp"

namespace pdcp {

/// Linear complementarity problem min(M x - b, x - g) = 0 with tridiagonal M.
struct TridiagonalLcp {
    TridiagonalMatrix matrix;
    std::vector<double> rhs;
    std::vector<double> obstacle;
};

/// Brennan-Schwartz algorithm: eliminate the superdiagonal from the last row
/// upward, then substitute downward applying the obstacle at each row. Exact
/// when the contact region is a single interval at the low-index end, which
/// holds for the American put discretizations solved here (the step matrices
/// are M-matrices). Throws SolveError on a zero pivot.
std::vector<double> brennan_schwartz_solve(const TridiagonalLcp& lcp);

struct DirectSolveResult {
    std::vector<double> u;
    std::vector<StepTrace> traces;
    /// max over steps and stages of max_l |min(x - g, M x - b)_l|
    double max_complementarity_residual = 0.0;
};

/// Penalty-free reference integrator: marches the one-dimensional problem
/// with the scheme in spec, solving each implicit stage as an exact LCP by
/// Brennan-Schwartz against the obstacle u0. Supports the theta and DIRK
/// families; throws std::invalid_argument for coupled schemes or 2D problems.
DirectSolveResult solve_pdcp_direct_1d(const DiscreteProblem& problem, const StepperSpec& spec);

}  // namespace pdcp
