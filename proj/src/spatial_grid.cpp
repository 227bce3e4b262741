#include "pdcp/spatial_grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pdcp/market.hpp"

namespace pdcp {
namespace {

// Arc length of the stretched tail after q unit parameter steps.
double tail_length(double gamma, double h_uniform, std::size_t q) {
    double z = gamma * static_cast<double>(q);
    if (z > 700.0) return std::numeric_limits<double>::infinity();
    return h_uniform * std::expm1(z) / gamma;
}

// Solves tail_length(gamma) = span for gamma > 0. tail_length is strictly
// increasing in gamma with limit h_uniform*q as gamma -> 0+, so a root exists
// iff span > h_uniform*q.
double solve_stretch_rate(double h_uniform, std::size_t q, double span) {
    if (!(span > h_uniform * static_cast<double>(q)))
        throw std::invalid_argument(
            "build_grid: stretched tail too short, no expanding map exists "
            "(need s_max - 2*strike > h_uniform * (m - m_uniform))");

    double lo = 0.0;  // f(lo) < 0 in the limit
    double hi = 1.0;
    while (tail_length(hi, h_uniform, q) < span) {
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("build_grid: stretch-rate bracketing failed");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // bisection hit FP resolution
        if (tail_length(mid, h_uniform, q) < span)
            lo = mid;
        else
            hi = mid;
    }
    double gamma = 0.5 * (lo + hi);
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::runtime_error("build_grid: stretch-rate root solve failed");
    return gamma;
}

}  // namespace

SpatialGrid build_grid(std::size_t m, double strike, double s_max) {
    if (m < 3) throw std::invalid_argument("build_grid: m must be at least 3");
    if (!(strike > 0.0)) throw std::invalid_argument("build_grid: strike must be > 0");
    if (!(s_max > 2.0 * strike))
        throw std::invalid_argument("build_grid: s_max must exceed 2*strike");

    SpatialGrid g;
    g.m = m;
    g.strike = strike;
    g.s_max = s_max;

    std::size_t m_u = static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(m)));
    m_u = std::min(m_u, m - 1);  // always leave at least one node for the tail
    g.m_uniform = m_u;
    g.h_uniform = 2.0 * strike / static_cast<double>(m_u - 1);

    std::size_t q = m - m_u;  // stretched intervals
    double span = s_max - 2.0 * strike;
    g.gamma = solve_stretch_rate(g.h_uniform, q, span);

    g.points.resize(m);
    for (std::size_t i = 0; i + 1 < m_u; ++i)
        g.points[i] = 2.0 * strike * static_cast<double>(i) / static_cast<double>(m_u - 1);
    g.points[m_u - 1] = 2.0 * strike;
    for (std::size_t j = 1; j < q; ++j)
        g.points[m_u - 1 + j] =
            2.0 * strike + g.h_uniform * std::expm1(g.gamma * static_cast<double>(j)) / g.gamma;
    g.points[m - 1] = s_max;  // snap away the bisection residual

    for (std::size_t i = 1; i < m; ++i)
        if (!(g.points[i] > g.points[i - 1]))
            throw std::runtime_error("build_grid: node sequence not strictly increasing");

    g.cell_edges.resize(m + 1);
    g.cell_edges[0] = 0.0;
    g.cell_edges[m] = s_max;
    for (std::size_t i = 1; i < m; ++i)
        g.cell_edges[i] = 0.5 * (g.points[i - 1] + g.points[i]);

    return g;
}

double grid_map_value(const SpatialGrid& grid, double xi) {
    double xi_star = static_cast<double>(grid.m_uniform - 1);
    if (xi < 0.0 || xi > static_cast<double>(grid.m - 1))
        throw std::invalid_argument("grid_map_value: xi outside [0, m-1]");
    if (xi <= xi_star) return grid.h_uniform * xi;
    return 2.0 * grid.strike + grid.h_uniform * std::expm1(grid.gamma * (xi - xi_star)) / grid.gamma;
}

std::vector<double> cell_average_payoff_1d(const SpatialGrid& grid, double strike) {
    if (!(strike > 0.0 && strike < grid.s_max))
        throw std::invalid_argument("cell_average_payoff_1d: strike outside (0, s_max)");

    std::vector<double> out(grid.m);
    for (std::size_t i = 0; i < grid.m; ++i) {
        double a = grid.cell_edges[i];
        double b = grid.cell_edges[i + 1];
        if (a < strike && strike < b)
            out[i] = (strike - a) * (strike - a) / (2.0 * (b - a));
        else
            out[i] = payoff_put_1d(grid.points[i], strike);
    }
    return out;
}

std::vector<double> cell_average_payoff_2d(const SpatialGrid& grid_s1,
                                           const SpatialGrid& grid_s2,
                                           double strike) {
    if (!(strike > 0.0 && strike < grid_s1.s_max && strike < grid_s2.s_max))
        throw std::invalid_argument("cell_average_payoff_2d: strike outside domain");

    // Antiderivative pattern for the integral of max(0, L - s1 - s2) over a
    // rectangle [a,b] x [c,d]: with H(t) = max(t,0)^3/6, the integral is
    // H(L-a-c) - H(L-b-c) - H(L-a-d) + H(L-b-d).
    auto hinge3 = [](double t) { return t > 0.0 ? t * t * t / 6.0 : 0.0; };

    double level = 2.0 * strike;  // kink line s1 + s2 = 2K of the halved payoff
    std::vector<double> out(grid_s1.m * grid_s2.m);
    for (std::size_t i = 0; i < grid_s1.m; ++i) {
        double a = grid_s1.cell_edges[i];
        double b = grid_s1.cell_edges[i + 1];
        for (std::size_t j = 0; j < grid_s2.m; ++j) {
            double c = grid_s2.cell_edges[j];
            double d = grid_s2.cell_edges[j + 1];
            double& v = out[i * grid_s2.m + j];
            if (a + c < level && level < b + d) {
                double integral = hinge3(level - a - c) - hinge3(level - b - c) -
                                  hinge3(level - a - d) + hinge3(level - b - d);
                v = 0.5 * integral / ((b - a) * (d - c));
            } else {
                v = payoff_put_on_average(grid_s1.points[i], grid_s2.points[j], strike);
            }
        }
    }
    return out;
}

}  // namespace pdcp
