#include "pdcp/discrete_operator.hpp"

#include <ostream>
#include <stdexcept>

#include "pdcp/csv_io.hpp"

namespace pdcp {

StencilWeights fd_weights(double h_left, double h_right) {
    if (!(h_left > 0.0) || !(h_right > 0.0))
        throw std::invalid_argument("fd_weights: spacings must be positive");
    StencilWeights w;
    w.h_left = h_left;
    w.h_right = h_right;
    double span = h_left + h_right;
    w.first = {-h_right / (h_left * span), (h_right - h_left) / (h_left * h_right),
               h_left / (h_right * span)};
    w.second = {2.0 / (h_left * span), -2.0 / (h_left * h_right), 2.0 / (h_right * span)};
    return w;
}

std::array<double, 3> fd_weights_first_left(double h1, double h2) {
    if (!(h1 > 0.0) || !(h2 > 0.0))
        throw std::invalid_argument("fd_weights_first_left: spacings must be positive");
    double span = h1 + h2;
    return {-(2.0 * h1 + h2) / (h1 * span), span / (h1 * h2), -h1 / (h2 * span)};
}

std::array<double, 3> fd_weights_first_right(double h1, double h2) {
    if (!(h1 > 0.0) || !(h2 > 0.0))
        throw std::invalid_argument("fd_weights_first_right: spacings must be positive");
    double span = h1 + h2;
    return {h2 / (h1 * span), -span / (h1 * h2), (h1 + 2.0 * h2) / (h2 * span)};
}

std::array<double, 3> fd_weights_second(double h1, double h2) {
    if (!(h1 > 0.0) || !(h2 > 0.0))
        throw std::invalid_argument("fd_weights_second: spacings must be positive");
    double span = h1 + h2;
    return {2.0 / (h1 * span), -2.0 / (h1 * h2), 2.0 / (h2 * span)};
}

DiscreteProblem assemble_1d(const MarketParams1D& params, const SpatialGrid& grid) {
    params.validate();
    std::size_t m = grid.m;

    std::vector<std::vector<std::pair<int, double>>> rows(m);
    rows[0].emplace_back(0, -params.r);  // s = 0: operator degenerates to -r u
    for (std::size_t i = 1; i + 1 < m; ++i) {
        double s = grid.points[i];
        StencilWeights w = fd_weights(grid.points[i] - grid.points[i - 1],
                                      grid.points[i + 1] - grid.points[i]);
        double diffusion = 0.5 * params.sigma * params.sigma * s * s;
        double convection = params.r * s;
        rows[i].emplace_back(static_cast<int>(i - 1),
                             diffusion * w.second[0] + convection * w.first[0]);
        rows[i].emplace_back(static_cast<int>(i),
                             diffusion * w.second[1] + convection * w.first[1] - params.r);
        rows[i].emplace_back(static_cast<int>(i + 1),
                             diffusion * w.second[2] + convection * w.first[2]);
    }
    // Row m-1 stays empty: far-field Dirichlet.

    DiscreteProblem p;
    p.a = SparseMatrix::from_rows(m, rows);
    p.u0 = cell_average_payoff_1d(grid, params.strike);
    p.dirichlet_mask.assign(m, 0);
    p.dirichlet_mask[m - 1] = 1;
    p.u0[m - 1] = 0.0;
    p.grids = {grid};
    p.dims = 1;
    p.m = m;
    p.maturity = params.maturity;
    p.strike = params.strike;
    return p;
}

DiscreteProblem assemble_2d(const MarketParams2D& params, const SpatialGrid& grid) {
    params.validate();
    std::size_t m = grid.m;
    std::size_t total = m * m;

    // Per-node stencil weights along one axis, reused for both directions.
    std::vector<StencilWeights> w(m);
    for (std::size_t i = 1; i + 1 < m; ++i)
        w[i] = fd_weights(grid.points[i] - grid.points[i - 1],
                          grid.points[i + 1] - grid.points[i]);

    double half_s1 = 0.5 * params.sigma1 * params.sigma1;
    double half_s2 = 0.5 * params.sigma2 * params.sigma2;
    double cross_coef = params.rho * params.sigma1 * params.sigma2;

    std::vector<std::vector<std::pair<int, double>>> rows(total);
    std::array<double, 9> acc{};  // local 3x3 block, (di+1)*3 + (dj+1)
    for (std::size_t i = 0; i < m; ++i) {
        double s1 = grid.points[i];
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t l = i * m + j;
            if (i == m - 1 || j == m - 1) continue;  // far-field Dirichlet row

            acc.fill(0.0);
            if (i > 0) {  // s1 terms vanish on the degenerate edge s1 = 0
                double diffusion = half_s1 * s1 * s1;
                double convection = params.r * s1;
                for (int a = 0; a < 3; ++a)
                    acc[a * 3 + 1] += diffusion * w[i].second[a] + convection * w[i].first[a];
            }
            double s2 = grid.points[j];
            if (j > 0) {
                double diffusion = half_s2 * s2 * s2;
                double convection = params.r * s2;
                for (int b = 0; b < 3; ++b)
                    acc[3 + b] += diffusion * w[j].second[b] + convection * w[j].first[b];
            }
            if (i > 0 && j > 0) {
                double c = cross_coef * s1 * s2;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) acc[a * 3 + b] += c * w[i].first[a] * w[j].first[b];
            }
            acc[4] -= params.r;

            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    double v = acc[a * 3 + b];
                    if (v == 0.0) continue;
                    int col = (static_cast<int>(i) + a - 1) * static_cast<int>(m) +
                              static_cast<int>(j) + b - 1;
                    rows[l].emplace_back(col, v);
                }
        }
    }

    DiscreteProblem p;
    p.a = SparseMatrix::from_rows(total, rows);
    p.u0 = cell_average_payoff_2d(grid, grid, params.strike);
    p.dirichlet_mask.assign(total, 0);
    for (std::size_t i = 0; i < m; ++i) {
        p.dirichlet_mask[i * m + (m - 1)] = 1;
        p.dirichlet_mask[(m - 1) * m + i] = 1;
        p.u0[i * m + (m - 1)] = 0.0;
        p.u0[(m - 1) * m + i] = 0.0;
    }
    p.grids = {grid, grid};
    p.dims = 2;
    p.m = m;
    p.maturity = params.maturity;
    p.strike = params.strike;
    return p;
}

void write_matrix_coo(std::ostream& os, const SparseMatrix& a) {
    for (std::size_t i = 0; i < a.n; ++i)
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            os << i << ' ' << a.cols[k] << ' ' << format_double(a.vals[k]) << '\n';
}

TridiagonalMatrix to_tridiagonal(const SparseMatrix& a) {
    std::size_t n = a.n;
    TridiagonalMatrix t;
    t.lower.assign(n - 1, 0.0);
    t.diag.assign(n, 0.0);
    t.upper.assign(n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            int j = a.cols[k];
            if (j == static_cast<int>(i))
                t.diag[i] = a.vals[k];
            else if (j == static_cast<int>(i) - 1)
                t.lower[i - 1] = a.vals[k];
            else if (j == static_cast<int>(i) + 1)
                t.upper[i] = a.vals[k];
            else if (a.vals[k] != 0.0)
                throw std::invalid_argument("to_tridiagonal: entry outside the band");
        }
    return t;
}

}  // namespace pdcp
