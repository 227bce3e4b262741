#include "pdcp/csv_io.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace pdcp {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

void write_error_rows_csv(std::ostream& os, const std::vector<ErrorRow>& rows) {
    os << "method,m,N,grid_kind,quantity,error\n";
    for (const auto& r : rows)
        os << r.method << ',' << r.m << ',' << r.n_steps << ',' << r.grid_kind << ','
           << r.quantity << ',' << format_double(r.error) << '\n';
}

void write_order_fits_csv(std::ostream& os, const std::vector<OrderFit>& fits) {
    os << "method,m,grid_kind,quantity,n_min,n_max,points,order\n";
    for (const auto& f : fits)
        os << f.method << ',' << f.m << ',' << f.grid_kind << ',' << f.quantity << ',' << f.n_min
           << ',' << f.n_max << ',' << f.points << ',' << format_double(f.order) << '\n';
}

void write_traces_csv(std::ostream& os, const std::vector<RunSummary>& runs) {
    os << "method,N,step,dt,kappa1,kappa2,linear_iterations\n";
    for (const auto& run : runs)
        for (const auto& t : run.traces)
            os << run.method << ',' << run.n_steps << ',' << t.step << ',' << format_double(t.dt)
               << ',' << t.kappa1 << ',' << t.kappa2 << ',' << t.linear_iterations << '\n';
}

void write_surface_1d_csv(std::ostream& os, const SpatialGrid& grid,
                          const std::vector<SurfaceColumn>& columns) {
    os << 's';
    for (const auto& c : columns) os << ',' << c.name;
    os << '\n';
    for (std::size_t i = 0; i < grid.m; ++i) {
        os << format_double(grid.points[i]);
        for (const auto& c : columns) os << ',' << format_double((*c.values)[i]);
        os << '\n';
    }
}

void write_surface_2d_csv(std::ostream& os, const SpatialGrid& grid_s1,
                          const SpatialGrid& grid_s2, const std::vector<SurfaceColumn>& columns) {
    os << "s1,s2";
    for (const auto& c : columns) os << ',' << c.name;
    os << '\n';
    for (std::size_t i = 0; i < grid_s1.m; ++i)
        for (std::size_t j = 0; j < grid_s2.m; ++j) {
            os << format_double(grid_s1.points[i]) << ',' << format_double(grid_s2.points[j]);
            for (const auto& c : columns)
                os << ',' << format_double((*c.values)[i * grid_s2.m + j]);
            os << '\n';
        }
}

}  // namespace pdcp
