#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fksusc/fk_equilibrium.hpp"
#include "fksusc/response.hpp"

namespace fksusc {

/// Truncated Matsubara-matrix inverse propagator with a single field tone:
/// diagonal i omega_m + mu_eff - lambda_m, and T h on every (m, m+ell) entry.
struct PerturbedInverse {
  MatsubaraGrid grid;
  int ell = 0;
  double h_value = 0.0;
  Eigen::MatrixXcd matrix;
};

PerturbedInverse build_perturbed_inverse(const MatsubaraGrid& grid, const BathFunction& bath,
                                         double mu_eff, int ell, double h_value);

/// Dense numerical inverse. Throws IllConditionedError if the condition estimate exceeds 1e14.
Eigen::MatrixXcd perturbed_green(const PerturbedInverse& inverse);

/// (1 - w1) G(mu) + w1 G(mu - U), each sector inverted numerically.
Eigen::MatrixXcd fk_perturbed_green(const MatsubaraGrid& grid, const BathFunction& bath,
                                    const FkParams& params, int ell, double h_value);

/// Central difference of G_{m,m+ell} in h, divided by -T. Covers every m of
/// the grid window whose partner m + ell is also inside it.
IndexedSeries numeric_delta_g(const MatsubaraGrid& grid, const BathFunction& bath,
                              const FkParams& params, int ell, double h_step);

/// Largest |G_mn| with n - m outside {0, ell}.
double max_off_selection(const Eigen::MatrixXcd& green, int ell);

struct OracleRow {
  int m = 0;
  complex numeric;
  complex analytic;
  // |numeric - analytic| / max(1, |analytic|)
  double deviation = 0.0;
  bool edge = false;
};

struct OracleReport {
  int ell = 0;
  double h_step = 0.0;
  double tolerance = 0.0;
  std::vector<OracleRow> rows;
  double max_deviation = 0.0;       // interior rows
  double max_edge_deviation = 0.0;  // rows with |m| >= n_cut - 2|ell|
  // max interior deviation at h_step over the same at h_step / 2
  double richardson_ratio = 0.0;
  std::vector<int> failing;
  bool passed = false;
};

/// Compares numeric and analytic coefficients row by row. Edge rows are
/// reported but excluded from pass/fail.
OracleReport compare_delta_g(const MatsubaraGrid& grid, int ell, const IndexedSeries& numeric,
                             const IndexedSeries& analytic, double tolerance);

OracleReport oracle_report(const MatsubaraGrid& grid, const BathFunction& bath,
                           const FkParams& params, int ell, double h_step = 1e-5,
                           double tolerance = 1e-6);

}  // namespace fksusc
