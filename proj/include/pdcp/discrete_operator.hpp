#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pdcp/linear_solvers.hpp"
#include "pdcp/market.hpp"
#include "pdcp/spatial_grid.hpp"

namespace pdcp {

/// Central three-point weights on the nonuniform stencil (x-h_left, x, x+h_right),
/// second-order for the first derivative and first-order (second-order on
/// smoothly varying grids) for the second derivative.
struct StencilWeights {
    std::array<double, 3> first;
    std::array<double, 3> second;
    double h_left = 0.0;
    double h_right = 0.0;
};

/// Throws std::invalid_argument unless both spacings are positive.
StencilWeights fd_weights(double h_left, double h_right);

/// One-sided second-order first-derivative weights on the three leftmost
/// nodes (x, x+h1, x+h1+h2), evaluated at x.
std::array<double, 3> fd_weights_first_left(double h1, double h2);

/// One-sided second-order first-derivative weights on the three rightmost
/// nodes (x-h1-h2, x-h1, x), evaluated at x.
std::array<double, 3> fd_weights_first_right(double h1, double h2);

/// Three-point second-derivative weights on (x, x+h1, x+h1+h2); the quadratic
/// interpolant has constant curvature, so these also serve one-sided.
std::array<double, 3> fd_weights_second(double h1, double h2);

/// Semidiscrete problem dU/dt = A U with obstacle U >= u0.
/// 2D unknowns are row-major with the s1 index outermost:
/// l = i * m + j for node (s1_i, s2_j).
/// Rows on the far-field boundary are empty (Dirichlet value 0) and marked in
/// dirichlet_mask; the solution is pinned there for all time.
struct DiscreteProblem {
    SparseMatrix a;
    std::vector<double> u0;             // cell-averaged payoff, 0 on Dirichlet rows
    std::vector<std::uint8_t> dirichlet_mask;
    std::vector<SpatialGrid> grids;     // one entry per dimension
    int dims = 0;
    std::size_t m = 0;                  // nodes per direction
    double maturity = 0.0;
    double strike = 0.0;

    std::size_t size() const { return u0.size(); }
};

/// Spatial discretization of the one-asset Black-Scholes operator
/// (1/2) sigma^2 s^2 u_ss + r s u_s - r u on the given grid. The row at s = 0
/// reduces to -r on the diagonal; the row at s_max is Dirichlet.
DiscreteProblem assemble_1d(const MarketParams1D& params, const SpatialGrid& grid);

/// Spatial discretization of the two-asset operator on the tensor grid
/// (same grid in both directions). Cross derivative via the tensor product of
/// the one-dimensional first-derivative stencils (nine-point). Degenerate
/// edges s1 = 0 and s2 = 0 keep the one-dimensional operator in the other
/// coordinate; the far-field edges are Dirichlet.
DiscreteProblem assemble_2d(const MarketParams2D& params, const SpatialGrid& grid);

/// Writes the operator in coordinate form, one "row col value" line per
/// stored entry, row-major order.
void write_matrix_coo(std::ostream& os, const SparseMatrix& a);

/// Extracts a tridiagonal view of a; throws std::invalid_argument if any
/// stored entry lies outside the three central diagonals.
TridiagonalMatrix to_tridiagonal(const SparseMatrix& a);

}  // namespace pdcp
