#pragma once

#include <vector>

#include "pdcp/spatial_grid.hpp"

namespace pdcp {

/// First and second spatial derivatives of a nodal field, one value per node.
struct GreekSurfaces1D {
    std::vector<double> delta;
    std::vector<double> gamma;
};

/// Derivatives on the tensor grid, row-major like the solution vector.
struct GreekSurfaces2D {
    std::vector<double> delta1;
    std::vector<double> delta2;
    std::vector<double> gamma11;
    std::vector<double> gamma12;
    std::vector<double> gamma22;
};

/// Differentiates u on the grid: central nonuniform three-point stencils in
/// the interior (the same weights the operator uses), one-sided second-order
/// stencils at the two boundary nodes. No extra solve is involved.
GreekSurfaces1D greeks_1d(const SpatialGrid& grid, const std::vector<double>& u);

/// Two-dimensional counterpart. The cross derivative gamma12 is the
/// composition of the two one-dimensional first-derivative stencils, which in
/// the interior coincides with the nine-point tensor stencil of the
/// operator's mixed term.
GreekSurfaces2D greeks_2d(const SpatialGrid& grid_s1, const SpatialGrid& grid_s2,
                          const std::vector<double>& u);

}  // namespace pdcp
