#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pdcp/experiments.hpp"

namespace pdcp {

/// Shortest round-trip decimal form, locale-independent (std::to_chars).
std::string format_double(double v);

/// header: method,m,N,grid_kind,quantity,error
void write_error_rows_csv(std::ostream& os, const std::vector<ErrorRow>& rows);

/// header: method,m,grid_kind,quantity,n_min,n_max,points,order
void write_order_fits_csv(std::ostream& os, const std::vector<OrderFit>& fits);

/// header: method,N,step,dt,kappa1,kappa2,linear_iterations
/// One line per time step of every run, runs in report order.
void write_traces_csv(std::ostream& os, const std::vector<RunSummary>& runs);

/// Named nodal field on a 1D grid, written as s,<name...> columns.
struct SurfaceColumn {
    std::string name;
    const std::vector<double>* values = nullptr;
};

void write_surface_1d_csv(std::ostream& os, const SpatialGrid& grid,
                          const std::vector<SurfaceColumn>& columns);

/// s1,s2,<name...> columns, row-major node order.
void write_surface_2d_csv(std::ostream& os, const SpatialGrid& grid_s1,
                          const SpatialGrid& grid_s2, const std::vector<SurfaceColumn>& columns);

}  // namespace pdcp
