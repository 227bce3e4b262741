#include "pdcp/greeks.hpp"

#include <array>
#include <stdexcept>

#include "pdcp/discrete_operator.hpp"

namespace pdcp {
namespace {

// Per-node weights over a three-node window starting at `base`.
struct NodeStencil {
    std::size_t base = 0;
    std::array<double, 3> w{};
};

std::vector<NodeStencil> first_derivative_stencils(const SpatialGrid& g) {
    std::size_t m = g.m;
    std::vector<NodeStencil> st(m);
    double h1 = g.points[1] - g.points[0];
    double h2 = g.points[2] - g.points[1];
    st[0] = {0, fd_weights_first_left(h1, h2)};
    for (std::size_t i = 1; i + 1 < m; ++i)
        st[i] = {i - 1,
                 fd_weights(g.points[i] - g.points[i - 1], g.points[i + 1] - g.points[i]).first};
    double g1 = g.points[m - 2] - g.points[m - 3];
    double g2 = g.points[m - 1] - g.points[m - 2];
    st[m - 1] = {m - 3, fd_weights_first_right(g1, g2)};
    return st;
}

std::vector<NodeStencil> second_derivative_stencils(const SpatialGrid& g) {
    std::size_t m = g.m;
    std::vector<NodeStencil> st(m);
    double h1 = g.points[1] - g.points[0];
    double h2 = g.points[2] - g.points[1];
    st[0] = {0, fd_weights_second(h1, h2)};
    for (std::size_t i = 1; i + 1 < m; ++i)
        st[i] = {i - 1,
                 fd_weights(g.points[i] - g.points[i - 1], g.points[i + 1] - g.points[i]).second};
    double g1 = g.points[m - 2] - g.points[m - 3];
    double g2 = g.points[m - 1] - g.points[m - 2];
    st[m - 1] = {m - 3, fd_weights_second(g1, g2)};
    return st;
}

// Applies the per-node stencils along one axis of the row-major field.
// stride selects the axis: stride == 1 differentiates along s2, stride == m2
// along s1.
void apply_along(const std::vector<NodeStencil>& st, const std::vector<double>& u,
                 std::size_t count_axis, std::size_t count_other, std::size_t stride,
                 std::size_t other_stride, std::vector<double>& out) {
    for (std::size_t t = 0; t < count_axis; ++t) {
        const NodeStencil& s = st[t];
        for (std::size_t o = 0; o < count_other; ++o) {
            double acc = 0.0;
            std::size_t base = s.base * stride + o * other_stride;
            for (int k = 0; k < 3; ++k) acc += s.w[k] * u[base + k * stride];
            out[t * stride + o * other_stride] = acc;
        }
    }
}

}  // namespace

GreekSurfaces1D greeks_1d(const SpatialGrid& grid, const std::vector<double>& u) {
    if (grid.m < 3) throw std::invalid_argument("greeks_1d: need at least three nodes");
    if (u.size() != grid.m) throw std::invalid_argument("greeks_1d: field size mismatch");

    GreekSurfaces1D g;
    g.delta.resize(grid.m);
    g.gamma.resize(grid.m);
    auto d1 = first_derivative_stencils(grid);
    auto d2 = second_derivative_stencils(grid);
    apply_along(d1, u, grid.m, 1, 1, 0, g.delta);
    apply_along(d2, u, grid.m, 1, 1, 0, g.gamma);
    return g;
}

GreekSurfaces2D greeks_2d(const SpatialGrid& grid_s1, const SpatialGrid& grid_s2,
                          const std::vector<double>& u) {
    std::size_t m1 = grid_s1.m, m2 = grid_s2.m;
    if (m1 < 3 || m2 < 3) throw std::invalid_argument("greeks_2d: need at least three nodes");
    if (u.size() != m1 * m2) throw std::invalid_argument("greeks_2d: field size mismatch");

    GreekSurfaces2D g;
    std::size_t total = m1 * m2;
    g.delta1.resize(total);
    g.delta2.resize(total);
    g.gamma11.resize(total);
    g.gamma12.resize(total);
    g.gamma22.resize(total);

    auto d1_s1 = first_derivative_stencils(grid_s1);
    auto d1_s2 = first_derivative_stencils(grid_s2);
    auto d2_s1 = second_derivative_stencils(grid_s1);
    auto d2_s2 = second_derivative_stencils(grid_s2);

    // axis s1: stride m2 across rows; axis s2: stride 1 within a row
    apply_along(d1_s1, u, m1, m2, m2, 1, g.delta1);
    apply_along(d1_s2, u, m2, m1, 1, m2, g.delta2);
    apply_along(d2_s1, u, m1, m2, m2, 1, g.gamma11);
    apply_along(d2_s2, u, m2, m1, 1, m2, g.gamma22);
    apply_along(d1_s1, g.delta2, m1, m2, m2, 1, g.gamma12);
    return g;
}

}  // namespace pdcp
