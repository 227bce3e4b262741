#pragma once

#include <cstddef>
#include <vector>

namespace pdcp {

/// One spatial axis: nodes, the finite-volume cell edges around them, and the
/// data describing how the grid was built (uniform part plus exponentially
/// stretched tail).
///
/// points[0] = 0, points[m-1] = s_max, strictly increasing.
/// cell_edges has m+1 entries: edge 0 is 0, edge m is s_max, interior edges
/// are node midpoints, so cell i = [cell_edges[i], cell_edges[i+1]] contains
/// points[i].
struct SpatialGrid {
    std::vector<double> points;
    std::vector<double> cell_edges;
    std::size_t m = 0;          // total node count
    std::size_t m_uniform = 0;  // nodes in the uniform region [0, 2*strike]
    double h_uniform = 0.0;     // spacing of the uniform region
    double gamma = 0.0;         // stretching rate of the tail
    double strike = 0.0;
    double s_max = 0.0;
};

/// Builds the nonuniform grid: m_uniform = min(ceil(0.8*m), m-1) equally
/// spaced nodes on [0, 2*strike], then the remaining nodes follow the C^1
/// map s(xi) = 2K + h_u*(exp(gamma*(xi - xi_star)) - 1)/gamma up to s_max.
/// gamma > 0 is found by bisection.
///
/// Throws std::invalid_argument if m < 3, strike <= 0, s_max <= 2*strike, or
/// the tail is too short for a strictly expanding map (requires
/// s_max - 2*strike > h_uniform * (m - m_uniform)).
SpatialGrid build_grid(std::size_t m, double strike, double s_max);

/// Evaluates the grid-generating map at a fractional index xi in [0, m-1]
/// (unit parameter step per node). Exposed so the smoothness of the junction
/// between the uniform and stretched regions can be checked directly.
double grid_map_value(const SpatialGrid& grid, double xi);

/// Cell-averaged put payoff. Equal to the pointwise payoff at the node except
/// in the single cell whose interior straddles the strike (cell_edges[i] < K
/// < cell_edges[i+1] strictly), where the exact average
/// (K - cell_edges[i])^2 / (2 * cell width) is used.
std::vector<double> cell_average_payoff_1d(const SpatialGrid& grid, double strike);

/// Cell-averaged put-on-the-average payoff on the tensor grid, row-major with
/// the s1 index outermost: entry i*grid_s2.m + j holds cell (i, j).
/// Cells whose interior is crossed by the kink line s1 + s2 = 2K get the
/// exact average of the payoff over the cell; all others get the pointwise
/// payoff at the node.
std::vector<double> cell_average_payoff_2d(const SpatialGrid& grid_s1,
                                           const SpatialGrid& grid_s2,
                                           double strike);

}  // namespace pdcp
