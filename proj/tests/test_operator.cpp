#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pdcp/discrete_operator.hpp"

using namespace pdcp;

TEST_CASE("central weights on uniform and nonuniform stencils") {
    StencilWeights w = fd_weights(1.0, 1.0);
    CHECK(w.first[0] == doctest::Approx(-0.5));
    CHECK(w.first[1] == doctest::Approx(0.0));
    CHECK(w.first[2] == doctest::Approx(0.5));
    CHECK(w.second[0] == doctest::Approx(1.0));
    CHECK(w.second[1] == doctest::Approx(-2.0));
    CHECK(w.second[2] == doctest::Approx(1.0));

    w = fd_weights(1.0, 2.0);
    CHECK(w.first[0] == doctest::Approx(-2.0 / 3.0));
    CHECK(w.first[1] == doctest::Approx(0.5));
    CHECK(w.first[2] == doctest::Approx(1.0 / 6.0));
    CHECK(w.second[0] == doctest::Approx(2.0 / 3.0));
    CHECK(w.second[1] == doctest::Approx(-1.0));
    CHECK(w.second[2] == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(fd_weights(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fd_weights(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("stencils differentiate quadratics exactly") {
    auto f = [](double x) { return 3.0 + 2.0 * x + 1.5 * x * x; };
    auto fp = [](double x) { return 2.0 + 3.0 * x; };
    double x0 = 1.3, h1 = 0.7, h2 = 1.1;

    StencilWeights w = fd_weights(h1, h2);
    double d1 = w.first[0] * f(x0 - h1) + w.first[1] * f(x0) + w.first[2] * f(x0 + h2);
    CHECK(d1 == doctest::Approx(fp(x0)).epsilon(1e-12));
    double d2 = w.second[0] * f(x0 - h1) + w.second[1] * f(x0) + w.second[2] * f(x0 + h2);
    CHECK(d2 == doctest::Approx(3.0).epsilon(1e-12));

    auto wl = fd_weights_first_left(h1, h2);
    double dl = wl[0] * f(x0) + wl[1] * f(x0 + h1) + wl[2] * f(x0 + h1 + h2);
    CHECK(dl == doctest::Approx(fp(x0)).epsilon(1e-12));

    auto wr = fd_weights_first_right(h1, h2);
    double dr = wr[0] * f(x0 - h1 - h2) + wr[1] * f(x0 - h2) + wr[2] * f(x0);
    CHECK(dr == doctest::Approx(fp(x0)).epsilon(1e-12));

    auto ws = fd_weights_second(h1, h2);
    double ds = ws[0] * f(x0) + ws[1] * f(x0 + h1) + ws[2] * f(x0 + h1 + h2);
    CHECK(ds == doctest::Approx(3.0).epsilon(1e-12));
}

namespace {

const MarketParams1D params_1d{0.40, 0.02, 0.5, 100.0, 500.0};
const MarketParams2D params_2d{0.30, 0.40, 0.50, 0.01, 0.5, 100.0, 500.0};

}  // namespace

TEST_CASE("1d operator structure") {
    SpatialGrid g = build_grid(60, 100.0, 500.0);
    DiscreteProblem p = assemble_1d(params_1d, g);

    CHECK(p.dims == 1);
    CHECK(p.size() == 60);
    CHECK(p.maturity == 0.5);

    // s = 0 row degenerates to the reaction term
    CHECK(p.a.row_ptr[1] - p.a.row_ptr[0] == 1);
    CHECK(p.a.at(0, 0) == doctest::Approx(-params_1d.r));

    // far field row is empty and masked
    CHECK(p.a.row_ptr[60] - p.a.row_ptr[59] == 0);
    CHECK(p.dirichlet_mask[59] == 1);
    CHECK(p.u0[59] == 0.0);

    for (std::size_t i = 0; i < 60; ++i)
        CHECK(p.a.row_ptr[i + 1] - p.a.row_ptr[i] <= 3);
    CHECK_NOTHROW(p.a.validate());
}

TEST_CASE("1d operator reproduces the continuous operator on polynomials") {
    SpatialGrid g = build_grid(80, 100.0, 500.0);
    DiscreteProblem p = assemble_1d(params_1d, g);
    double r = params_1d.r, sig = params_1d.sigma;

    std::vector<double> ones(g.m, 1.0), s(g.m), s2(g.m);
    for (std::size_t i = 0; i < g.m; ++i) {
        s[i] = g.points[i];
        s2[i] = g.points[i] * g.points[i];
    }

    // A 1 = -r, A s = 0, A s^2 = (sigma^2 + r) s^2 on non-Dirichlet rows
    auto a1 = p.a.multiply(ones);
    auto as = p.a.multiply(s);
    auto as2 = p.a.multiply(s2);
    for (std::size_t i = 0; i + 1 < g.m; ++i) {
        CHECK(a1[i] == doctest::Approx(-r).epsilon(1e-10));
        CHECK(as[i] == doctest::Approx(0.0).scale(r * g.points[i] + 1.0).epsilon(1e-9));
        CHECK(as2[i] ==
              doctest::Approx((sig * sig + r) * s2[i]).scale(s2[i] + 1.0).epsilon(1e-8));
    }
    CHECK(a1[g.m - 1] == 0.0);
}

TEST_CASE("2d operator structure and action") {
    SpatialGrid g = build_grid(12, 100.0, 500.0);
    DiscreteProblem p = assemble_2d(params_2d, g);
    std::size_t m = 12;
    double r = params_2d.r;

    CHECK(p.dims == 2);
    CHECK(p.size() == m * m);

    // corner (0,0) keeps only the reaction term
    CHECK(p.a.row_ptr[1] - p.a.row_ptr[0] == 1);
    CHECK(p.a.at(0, 0) == doctest::Approx(-r));

    // far-field Dirichlet rows are empty, including both edges
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t top = i * m + (m - 1), right = (m - 1) * m + i;
        CHECK(p.a.row_ptr[top + 1] - p.a.row_ptr[top] == 0);
        CHECK(p.a.row_ptr[right + 1] - p.a.row_ptr[right] == 0);
        CHECK(p.dirichlet_mask[top] == 1);
        CHECK(p.dirichlet_mask[right] == 1);
        CHECK(p.u0[top] == 0.0);
        CHECK(p.u0[right] == 0.0);
    }

    for (std::size_t l = 0; l < m * m; ++l)
        CHECK(p.a.row_ptr[l + 1] - p.a.row_ptr[l] <= 9);

    std::vector<double> ones(m * m, 1.0), s1(m * m), s2v(m * m), s1s2(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            s1[i * m + j] = g.points[i];
            s2v[i * m + j] = g.points[j];
            s1s2[i * m + j] = g.points[i] * g.points[j];
        }

    auto a1 = p.a.multiply(ones);
    auto av1 = p.a.multiply(s1);
    auto av2 = p.a.multiply(s2v);
    auto ax = p.a.multiply(s1s2);
    double cross = params_2d.rho * params_2d.sigma1 * params_2d.sigma2;
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j + 1 < m; ++j) {
            std::size_t l = i * m + j;
            double scale = g.points[i] * g.points[j] + 1.0;
            CHECK(a1[l] == doctest::Approx(-r).epsilon(1e-10));
            CHECK(av1[l] == doctest::Approx(0.0).scale(scale).epsilon(1e-9));
            CHECK(av2[l] == doctest::Approx(0.0).scale(scale).epsilon(1e-9));
            CHECK(ax[l] ==
                  doctest::Approx((cross + r) * s1s2[l]).scale(scale).epsilon(1e-8));
        }
}

TEST_CASE("2d operator with rho=0 splits into the two 1d operators") {
    SpatialGrid g = build_grid(10, 100.0, 500.0);
    MarketParams2D uncorrelated = params_2d;
    uncorrelated.rho = 0.0;
    DiscreteProblem p2 = assemble_2d(uncorrelated, g);

    MarketParams1D along_s1{uncorrelated.sigma1, uncorrelated.r, uncorrelated.maturity, 100.0,
                            500.0};
    MarketParams1D along_s2{uncorrelated.sigma2, uncorrelated.r, uncorrelated.maturity, 100.0,
                            500.0};
    DiscreteProblem p1a = assemble_1d(along_s1, g);
    DiscreteProblem p1b = assemble_1d(along_s2, g);

    std::size_t m = 10;
    for (std::size_t i = 1; i + 1 < m; ++i)
        for (std::size_t j = 1; j + 1 < m; ++j) {
            std::size_t l = i * m + j;
            // every row entry is a 1d contribution; the two -r reactions
            // collapse into one
            CHECK(p2.a.row_ptr[l + 1] - p2.a.row_ptr[l] == 5);
            CHECK(p2.a.at(l, l) == doctest::Approx(p1a.a.at(i, i) + p1b.a.at(j, j) +
                                                   uncorrelated.r));
            CHECK(p2.a.at(l, l - m) == doctest::Approx(p1a.a.at(i, i - 1)));
            CHECK(p2.a.at(l, l + m) == doctest::Approx(p1a.a.at(i, i + 1)));
            CHECK(p2.a.at(l, l - 1) == doctest::Approx(p1b.a.at(j, j - 1)));
            CHECK(p2.a.at(l, l + 1) == doctest::Approx(p1b.a.at(j, j + 1)));
        }
}

TEST_CASE("initial data is the cell-averaged payoff with Dirichlet overrides") {
    SpatialGrid g = build_grid(40, 100.0, 500.0);
    DiscreteProblem p = assemble_1d(params_1d, g);
    auto expect = cell_average_payoff_1d(g, 100.0);
    expect[39] = 0.0;
    for (std::size_t i = 0; i < 40; ++i) CHECK(p.u0[i] == expect[i]);
}

TEST_CASE("tridiagonal extraction") {
    SpatialGrid g = build_grid(30, 100.0, 500.0);
    DiscreteProblem p1 = assemble_1d(params_1d, g);
    TridiagonalMatrix t = to_tridiagonal(p1.a);
    CHECK(t.n() == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(t.diag[i] == p1.a.at(i, i));
        if (i > 0) CHECK(t.lower[i - 1] == p1.a.at(i, i - 1));
        if (i + 1 < 30) CHECK(t.upper[i] == p1.a.at(i, i + 1));
    }

    SpatialGrid g2 = build_grid(6, 100.0, 500.0);
    DiscreteProblem p2 = assemble_2d(params_2d, g2);
    CHECK_THROWS_AS(to_tridiagonal(p2.a), std::invalid_argument);
}

TEST_CASE("coo dump round-trips") {
    SpatialGrid g = build_grid(15, 100.0, 500.0);
    DiscreteProblem p = assemble_1d(params_1d, g);
    std::ostringstream os;
    write_matrix_coo(os, p.a);

    std::istringstream is(os.str());
    std::size_t row, col;
    double val;
    std::size_t count = 0;
    while (is >> row >> col >> val) {
        CHECK(p.a.at(row, col) == doctest::Approx(val).epsilon(1e-15));
        ++count;
    }
    CHECK(count == p.a.nnz());
}
