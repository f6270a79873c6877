#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/baths.hpp"
#include "../support/draws.hpp"
#include "fksusc/errors.hpp"
#include "fksusc/response.hpp"

using namespace fksusc;
using std::numbers::pi;

namespace {

FkEquilibrium equilibrium(const testing::Draw& d, int n_cut) {
  return FkEquilibrium(MatsubaraGrid(d.beta, n_cut), testing::make_bath(d, n_cut + std::abs(d.ell) + 1), d.params);
}

// T sum over the pair window of -G^s_m G^s_{m+ell} for one sector
complex sector_bubble_sum(const FkEquilibrium& eq, double mu_eff, int ell) {
  const PairWindow w = pair_window(eq.grid(), ell);
  complex sum{};
  for (int m = w.first; m <= w.last(); ++m)
    sum -= sector_green(eq.grid(), eq.bath(), mu_eff, m) * sector_green(eq.grid(), eq.bath(), mu_eff, m + ell);
  return eq.grid().temperature() * sum;
}

double rel(complex a, complex b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST_CASE("pair window") {
  const MatsubaraGrid grid(1.0, 10);
  CHECK(pair_window(grid, 0).first == -10);
  CHECK(pair_window(grid, 0).count == 20);
  CHECK(pair_window(grid, 1).first == -10);
  CHECK(pair_window(grid, 1).last() == 8);
  CHECK(pair_window(grid, 2).first == -11);
  CHECK(pair_window(grid, 2).last() == 8);
  CHECK(pair_window(grid, -2).first == -9);
  CHECK(pair_window(grid, -2).last() == 10);
  for (int ell = -7; ell <= 7; ++ell) {
    const PairWindow w = pair_window(grid, ell);
    CHECK(w.first + w.last() == -1 - ell);  // symmetric under m <-> -m-1-ell
    CHECK(std::abs(2 * w.first + 1 + ell) < 20);
    CHECK(std::abs(2 * (w.first - 1) + 1 + ell) >= 20);
    CHECK(std::abs(2 * (w.last() + 1) + 1 + ell) >= 20);
  }
}

TEST_CASE("static component is rejected everywhere") {
  const MatsubaraGrid grid(1.0, 8);
  const FkEquilibrium eq(grid, atomic_bath(grid), {0.1, 1.0, 0.5});
  CHECK_THROWS_AS(bare_bubble(eq, 0), StaticComponentError);
  CHECK_THROWS_AS(fk_vertex(eq, 0), StaticComponentError);
  CHECK_THROWS_AS(delta_sigma_coefficient(eq, 0), StaticComponentError);
  CHECK_THROWS_AS(chi_closed_form(eq, 0), StaticComponentError);
  CHECK_THROWS_AS(chi_direct(eq, 0), StaticComponentError);
  CHECK_THROWS_AS(assemble(eq, 0), StaticComponentError);
  CHECK_THROWS_AS(tail_estimate(grid, 0), StaticComponentError);
}

TEST_CASE("bare bubble") {
  SUBCASE("product of two free propagators") {
    const MatsubaraGrid grid(1.0, 8);
    const FkEquilibrium eq(grid, atomic_bath(grid), {0.0, 0.0, 0.0});
    const BareBubble chi0 = bare_bubble(eq, 1);
    CHECK(chi0.series.at(0).real() == doctest::Approx(1.0 / (3.0 * pi * pi)).epsilon(1e-14));
    CHECK(chi0.series.at(0).real() == doctest::Approx(0.03377372788077926));
    CHECK(std::abs(chi0.series.at(0).imag()) <= 1e-18);
  }
  SUBCASE("w1 = 0 is the light-sector bubble") {
    const MatsubaraGrid grid(3.0, 16);
    const BathFunction bath = single_level_bath(grid, 0.6, 0.3);
    const FkEquilibrium eq(grid, bath, {0.4, 1.5, 0.0});
    const BareBubble chi0 = bare_bubble(eq, 2);
    for (int m = chi0.series.first; m <= chi0.series.last(); ++m)
      CHECK(chi0.series.at(m) == -sector_green(grid, bath, 0.4, m) * sector_green(grid, bath, 0.4, m + 2));
  }
  SUBCASE("independent re-evaluation at random points") {
    testing::DrawGenerator gen(7);
    for (int trial = 0; trial < 10; ++trial) {
      const testing::Draw d = gen.next();
      CAPTURE(d.describe());
      const FkEquilibrium eq = equilibrium(d, 64);
      const BareBubble chi0 = bare_bubble(eq, d.ell);
      for (int m = chi0.series.first; m <= chi0.series.last(); ++m) {
        const complex gm = fk_green_eq(eq.grid(), eq.bath(), d.params, m);
        const complex gn = fk_green_eq(eq.grid(), eq.bath(), d.params, m + d.ell);
        CHECK(std::abs(chi0.series.at(m) + gm * gn) <= 1e-15 * std::abs(gm * gn));
      }
    }
  }
}

TEST_CASE("FK vertex") {
  const MatsubaraGrid grid(2.0, 32);
  const BathFunction bath = single_level_bath(grid, 0.9, -0.2);
  SUBCASE("vanishes without interaction") {
    for (const complex& g : fk_vertex(FkEquilibrium(grid, bath, {0.3, 0.0, 0.4}), 1).series.values) CHECK(g == complex{});
  }
  SUBCASE("vanishes for a filled heavy level and for an empty one") {
    for (double w1 : {0.0, 1.0})
      for (const complex& g : fk_vertex(FkEquilibrium(grid, bath, {0.3, 1.7, w1}), -2).series.values)
        CHECK(g == complex{});
  }
  SUBCASE("difference ratio equals the difference-free form at random points") {
    testing::DrawGenerator gen(99);
    for (int trial = 0; trial < 20; ++trial) {
      const testing::Draw d = gen.next();
      CAPTURE(d.describe());
      const FkEquilibrium eq = equilibrium(d, 64);
      const DiagonalVertex vertex = fk_vertex(eq, d.ell);
      const IndexedSeries ratio = delta_sigma_coefficient(eq, d.ell);
      for (int m = vertex.series.first; m <= vertex.series.last(); ++m) {
        const complex expanded = vertex_ratio_expanded(eq, m, m + d.ell);
        CHECK(std::abs(ratio.at(m) - expanded) <= 1e-10 * std::max(1e-300, std::abs(expanded)));
        // the vertex carries an explicit 1/T
        CHECK(std::abs(eq.grid().temperature() * vertex.series.at(m) - ratio.at(m)) <= 1e-14 * std::abs(ratio.at(m)));
      }
    }
  }
  SUBCASE("degenerate Green's functions use the difference-free form") {
    // tabulated bath with a_1 = a_0, so G_0 = G_1 and Sigma_0 = Sigma_1 exactly
    const MatsubaraGrid small(1.0, 4);
    std::vector<complex> lam(8, complex{});
    const auto set = [&](int m, complex v) {
      lam[static_cast<std::size_t>(small.offset(m))] = v;
      lam[static_cast<std::size_t>(small.offset(-m - 1))] = std::conj(v);
    };
    const complex lam0(0.1, -0.3);
    set(0, lam0);
    set(1, lam0 + fermionic_frequency(1, small) - fermionic_frequency(0, small));
    set(2, {0.0, -0.1});
    set(3, {0.0, -0.05});
    const FkEquilibrium eq(small, BathFunction::tabulated(small, BathKind::table, lam), {0.2, 1.1, 0.4});
    REQUIRE(std::abs(eq.green(0) - eq.green(1)) <= 1e-15 * std::abs(eq.green(0)));
    const IndexedSeries ratio = delta_sigma_coefficient(eq, 1);
    CHECK(std::isfinite(ratio.at(0).real()));
    CHECK(ratio.at(0) == vertex_ratio_expanded(eq, 0, 1));
    CHECK(ratio.at(0) != complex{});
  }
}

TEST_CASE("general Bethe-Salpeter solver") {
  SUBCASE("vanishing vertex returns the bubble") {
    const MatsubaraGrid grid(2.0, 16);
    const FkEquilibrium eq(grid, single_level_bath(grid, 0.5, 0.1), {0.2, 1.0, 0.3});
    const BareBubble chi0 = bare_bubble(eq, 1);
    const auto n = chi0.series.size();
    const ResolvedSusceptibility chi = bse_solve_general(chi0, Eigen::MatrixXcd::Zero(n, n), grid.temperature());
    CHECK(chi.series.values == chi0.series.values);
    CHECK(chi.residual == 0.0);
  }
  SUBCASE("two-component toy system") {
    const BareBubble chi0{1, {0, {complex(1.0), complex(1.0)}}};
    const ResolvedSusceptibility chi = bse_solve_general(chi0, Eigen::MatrixXcd::Identity(2, 2), 1.0);
    CHECK(chi.series.values[0] == complex(0.5));
    CHECK(chi.series.values[1] == complex(0.5));
  }
  SUBCASE("singular systems are reported with their condition") {
    const BareBubble chi0{1, {0, {complex(1.0), complex(1.0)}}};
    CHECK_THROWS_AS(bse_solve_general(chi0, -Eigen::MatrixXcd::Identity(2, 2), 1.0), IllConditionedError);
    CHECK_THROWS_AS(bse_solve_general(chi0, Eigen::MatrixXcd::Identity(3, 3), 1.0), InputError);
  }
  SUBCASE("embedded FK vertex matches the diagonal solver") {
    testing::DrawGenerator gen(5);
    for (int trial = 0; trial < 8; ++trial) {
      const testing::Draw d = gen.next();
      CAPTURE(d.describe());
      const FkEquilibrium eq = equilibrium(d, 48);
      const BareBubble chi0 = bare_bubble(eq, d.ell);
      const DiagonalVertex vertex = fk_vertex(eq, d.ell);
      const double T = eq.grid().temperature();
      const ResolvedSusceptibility dense = bse_solve_general(chi0, dense_vertex(vertex), T);
      const ResolvedSusceptibility diag = bse_solve_diagonal(chi0, vertex, T);
      CHECK(dense.residual <= 1e-14);
      for (int i = 0; i < dense.series.size(); ++i)
        CHECK(rel(dense.series.values[static_cast<std::size_t>(i)], diag.series.values[static_cast<std::size_t>(i)]) <= 1e-12);
    }
  }
}

TEST_CASE("diagonal Bethe-Salpeter solver") {
  const BareBubble chi0{2, {-1, {complex(0.3, 0.1), complex(1.0)}}};
  SUBCASE("zero vertex") {
    const DiagonalVertex zero{2, {-1, {complex{}, complex{}}}};
    CHECK(bse_solve_diagonal(chi0, zero, 0.5).series.values == chi0.series.values);
  }
  SUBCASE("two-particle divergence names the index") {
    const DiagonalVertex vertex{2, {-1, {complex{}, complex(-2.0)}}};
    try {
      bse_solve_diagonal(chi0, vertex, 0.5);
      FAIL("expected SingularError");
    } catch (const SingularError& e) {
      CHECK(e.index() == 0);
    }
  }
}

TEST_CASE("closed form and direct routes") {
  SUBCASE("free limit equals the bubble sum") {
    const MatsubaraGrid grid(3.0, 64);
    const FkEquilibrium eq(grid, single_level_bath(grid, 0.8, 0.2), {0.4, 0.0, 0.6});
    const complex bubble = grid.temperature() * bare_bubble(eq, 3).series.sum();
    CHECK(rel(chi_closed_form(eq, 3), bubble) <= 1e-13);
    CHECK(rel(chi_direct(eq, 3), bubble) <= 1e-13);
    const DiagonalVertex vertex = fk_vertex(eq, 3);
    CHECK(rel(bse_solve_diagonal(bare_bubble(eq, 3), vertex, grid.temperature()).total(grid.temperature()), bubble) <= 1e-13);
  }
  SUBCASE("empty heavy level cancels to the light bubble") {
    const MatsubaraGrid grid(6.0, 64);
    const FkEquilibrium eq(grid, single_level_bath(grid, 0.8, 0.2), {0.4, 1.3, 0.0});
    CHECK(rel(chi_closed_form(eq, -2), sector_bubble_sum(eq, 0.4, -2)) <= 1e-12);
  }
  SUBCASE("filled heavy level is the shifted-sector bubble") {
    const MatsubaraGrid grid(6.0, 64);
    const FkEquilibrium eq(grid, single_level_bath(grid, 0.8, 0.2), {0.4, 1.3, 1.0});
    CHECK(rel(chi_direct(eq, 1), sector_bubble_sum(eq, 0.4 - 1.3, 1)) <= 1e-12);
  }
  SUBCASE("route equivalence at random points") {
    testing::DrawGenerator gen(31);
    for (int trial = 0; trial < 20; ++trial) {
      const testing::Draw d = gen.next();
      CAPTURE(d.describe());
      const FkEquilibrium eq = equilibrium(d, 128);
      const double T = eq.grid().temperature();
      const complex closed = chi_closed_form(eq, d.ell);
      const complex bse = bse_solve_diagonal(bare_bubble(eq, d.ell), fk_vertex(eq, d.ell), T).total(T);
      CHECK(relative_deviation(bse, closed) <= 1e-12);
      CHECK(relative_deviation(chi_direct(eq, d.ell), closed) <= 1e-13);
    }
  }
}

TEST_CASE("tail estimate matches brute-force summation of the asymptote") {
  for (double beta : {0.7, 4.0, 19.0})
    for (int ell : {1, -1, 2, -3, 5}) {
      const MatsubaraGrid grid(beta, 64);
      const PairWindow w = pair_window(grid, ell);
      // sum 1/(s_m s_{m+ell}) over |m| <= M outside the window, plus the 1/(2M) remainder
      const long M = 2'000'000;
      double sum = 0.0;
      for (long m = -M; m <= M; ++m) {
        if (m >= w.first && m <= w.last()) continue;
        sum += 1.0 / ((2.0 * m + 1.0) * (2.0 * (m + ell) + 1.0));
      }
      sum += 1.0 / (2.0 * M);
      const double brute = beta * sum / (pi * pi);
      CAPTURE(beta);
      CAPTURE(ell);
      CHECK(tail_estimate(grid, ell) == doctest::Approx(brute).epsilon(1e-8));
    }
}

TEST_CASE("assemble") {
  SUBCASE("single route has no deviations") {
    const MatsubaraGrid grid(2.0, 32);
    const FkEquilibrium eq(grid, atomic_bath(grid), {0.0, 0.0, 0.0});
    const SusceptibilityResult r = assemble(eq, 1, {{Route::closed}, BseSolver::dense});
    CHECK(r.routes.size() == 1);
    CHECK(r.deviations.empty());
    CHECK(r.max_deviation == 0.0);
    CHECK(r.value(Route::closed).has_value());
    CHECK_FALSE(r.value(Route::bse).has_value());
  }
  SUBCASE("all routes agree and cutoff doubling stays within the tail estimate") {
    testing::DrawGenerator gen(404);
    for (int trial = 0; trial < 6; ++trial) {
      testing::Draw d = gen.next();
      CAPTURE(d.describe());
      const BathFunction bath = testing::make_bath(d, 2 * 128 + std::abs(d.ell) + 1);
      const FkEquilibrium coarse(MatsubaraGrid(d.beta, 128), bath, d.params);
      const FkEquilibrium fine(MatsubaraGrid(d.beta, 256), bath, d.params);
      const SusceptibilityResult a = assemble(coarse, d.ell);
      const SusceptibilityResult b = assemble(fine, d.ell);
      REQUIRE(a.ok());
      CHECK(a.max_deviation <= 1e-10);
      CHECK(a.deviations.size() == 3);
      CHECK(a.bse_residual.value() <= 1e-13);
      CHECK(std::abs(*b.value(Route::closed) - *a.value(Route::closed)) <= a.tail_estimate);
    }
  }
  SUBCASE("conjugate symmetry and reality") {
    const MatsubaraGrid grid(7.0, 128);
    const FkEquilibrium eq(grid, single_level_bath(MatsubaraGrid(7.0, 140), 0.9, 0.35), {0.6, -1.4, 0.3});
    for (int ell : {1, 2, 5}) {
      const complex plus = *assemble(eq, ell).value(Route::bse);
      const complex minus = *assemble(eq, -ell).value(Route::bse);
      CHECK(relative_deviation(minus, std::conj(plus)) <= 1e-10);
      CHECK(std::abs(plus.imag()) <= 1e-10 * std::abs(plus));
    }
  }
}
