#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fksusc/fk_equilibrium.hpp"

namespace fksusc {

/// Values indexed by a contiguous run of fermionic indices starting at `first`.
struct IndexedSeries {
  int first = 0;
  std::vector<complex> values;

  int size() const noexcept { return static_cast<int>(values.size()); }
  int last() const noexcept { return first + size() - 1; }
  bool contains(int m) const noexcept { return m >= first && m <= last(); }
  const complex& at(int m) const { return values.at(static_cast<std::size_t>(m - first)); }
  complex sum() const;
};

/// Fermionic indices summed for transfer ell: every m with |2m + 1 + ell| < 2 n_cut.
///
/// The set is symmetric under m <-> -m-1-ell, the map that pairs each summand
/// with its complex conjugate, and for ell = 0 it reduces to the grid window.
struct PairWindow {
  int first;
  int count;
  int last() const noexcept { return first + count - 1; }
};
PairWindow pair_window(const MatsubaraGrid& grid, int ell);

/// chi0(m) = -G_m G_{m+ell}
struct BareBubble {
  int ell = 0;
  IndexedSeries series;
};

/// Gamma_m = (1/T) (Sigma_m - Sigma_{m+ell}) / (G_m - G_{m+ell}); the FK vertex is diagonal.
struct DiagonalVertex {
  int ell = 0;
  IndexedSeries series;
};

/// chi(i omega_m, i omega_{m+ell}; i nu_ell) on the (m, m+ell) diagonal.
struct ResolvedSusceptibility {
  int ell = 0;
  IndexedSeries series;
  // max-norm residual of the linear system, relative to max |chi0|
  double residual = 0.0;
  // 1-norm condition estimate (1 for the diagonal solver)
  double condition = 1.0;

  /// T * sum_m chi_m
  complex total(double temperature) const { return temperature * series.sum(); }
};

BareBubble bare_bubble(const FkEquilibrium& eq, int ell);

/// (Sigma_m - Sigma_n) / (G_m - G_n) on n = m + ell. Falls back to the
/// difference-free form when |G_m - G_n| < 1e-14 max(|G_m|, |G_n|).
IndexedSeries delta_sigma_coefficient(const FkEquilibrium& eq, int ell);

/// The difference-free form of the same ratio:
/// U^2 w1 (1-w1) / (G_m G_n [(a_m - (1-w1)U)(a_n - (1-w1)U) + w1 (1-w1) U^2]).
complex vertex_ratio_expanded(const FkEquilibrium& eq, int m, int n);

DiagonalVertex fk_vertex(const FkEquilibrium& eq, int ell);

/// Embeds a diagonal vertex as a dense matrix over its index run.
Eigen::MatrixXcd dense_vertex(const DiagonalVertex& vertex);

/// Solves (I + diag(chi0) T Gamma) chi = chi0 with a dense LU.
///
/// `vertex` is square over the bubble's index run. Throws IllConditionedError
/// when the condition estimate exceeds 1e14.
ResolvedSusceptibility bse_solve_general(const BareBubble& chi0, const Eigen::MatrixXcd& vertex,
                                         double temperature);

/// chi_m = chi0_m / (1 + chi0_m T Gamma_m), per index.
ResolvedSusceptibility bse_solve_diagonal(const BareBubble& chi0, const DiagonalVertex& vertex,
                                          double temperature);

/// Coefficient F(m, m+ell) of -T h_ell in the linear-order change of the FK
/// Green's function, over a common four-factor denominator.
IndexedSeries delta_g_coefficient(const FkEquilibrium& eq, int ell);
IndexedSeries delta_g_coefficient(const FkEquilibrium& eq, int ell, const PairWindow& indices);

/// -T sum_m F(m, m+ell) with F in common-denominator form.
complex chi_closed_form(const FkEquilibrium& eq, int ell);

/// -T sum_m F(m, m+ell) with F read directly as the weighted sum of the two
/// sector products (1-w1)/(a_m a_n) + w1/(b_m b_n).
complex chi_direct(const FkEquilibrium& eq, int ell);

/// T sum over indices outside the pair window of the 1/omega^2 asymptote
/// 1/(omega_m omega_{m+ell}), evaluated exactly by telescoping; returned as a magnitude.
double tail_estimate(const MatsubaraGrid& grid, int ell);

enum class Route { bse, closed, direct };
std::string_view to_string(Route route);
std::optional<Route> route_from_string(std::string_view name);

enum class BseSolver { dense, diagonal };
std::string_view to_string(BseSolver solver);
std::optional<BseSolver> bse_solver_from_string(std::string_view name);

struct RouteOutcome {
  Route route = Route::closed;
  std::optional<complex> value;
  std::string error;
  double seconds = 0.0;
};

struct RouteDeviation {
  Route a = Route::bse;
  Route b = Route::closed;
  // |chi_a - chi_b| / max(1, |chi_a|, |chi_b|)
  double value = 0.0;
};

struct SusceptibilityResult {
  int ell = 0;
  int n_cut = 0;
  PairWindow window{0, 0};
  double tail_estimate = 0.0;
  std::vector<RouteOutcome> routes;
  std::vector<RouteDeviation> deviations;
  double max_deviation = 0.0;
  // BSE diagnostics, present when the bse route ran
  std::optional<double> bse_residual;
  std::optional<double> bse_condition;

  const RouteOutcome* find(Route route) const;
  std::optional<complex> value(Route route) const;
  bool ok() const;
};

struct AssembleOptions {
  std::vector<Route> routes{Route::bse, Route::closed, Route::direct};
  BseSolver bse_solver = BseSolver::dense;
};

/// Runs the selected routes; a failing route is recorded and does not stop the others.
/// Throws StaticComponentError for ell = 0.
SusceptibilityResult assemble(const FkEquilibrium& eq, int ell, const AssembleOptions& options = {});

double relative_deviation(complex a, complex b);

}  // namespace fksusc
