#include "fksusc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "fksusc/errors.hpp"

namespace fksusc {

namespace {

constexpr double kMaxCondition = 1e14;

bool is_edge(const MatsubaraGrid& grid, int ell, int m) {
  return std::abs(m) >= grid.n_cut() - 2 * std::abs(ell);
}

// m such that both m and m + ell lie in the grid window
PairWindow truncated_pairs(const MatsubaraGrid& grid, int ell) {
  const int first = std::max(grid.first(), grid.first() - ell);
  const int last = std::min(grid.last(), grid.last() - ell);
  return {first, std::max(0, last - first + 1)};
}

}  // namespace

PerturbedInverse build_perturbed_inverse(const MatsubaraGrid& grid, const BathFunction& bath,
                                         double mu_eff, int ell, double h_value) {
  if (std::abs(ell) >= grid.size()) throw InputError("ell", "field tone lies outside the grid window");
  if (!std::isfinite(h_value)) throw InputError("h_value", "must be finite");
  const auto n = static_cast<Eigen::Index>(grid.size());
  PerturbedInverse out{grid, ell, h_value, Eigen::MatrixXcd::Zero(n, n)};
  for (int m = grid.first(); m <= grid.last(); ++m) {
    out.matrix(grid.offset(m), grid.offset(m)) = inverse_free_propagator(grid, bath, mu_eff, m);
    const int n_idx = shifted_index(m, ell);
    if (grid.contains(n_idx)) out.matrix(grid.offset(m), grid.offset(n_idx)) = grid.temperature() * h_value;
  }
  return out;
}

Eigen::MatrixXcd perturbed_green(const PerturbedInverse& inverse) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(inverse.matrix);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) throw IllConditionedError("singular perturbed inverse", condition);
  return lu.inverse();
}

Eigen::MatrixXcd fk_perturbed_green(const MatsubaraGrid& grid, const BathFunction& bath,
                                    const FkParams& params, int ell, double h_value) {
  params.validate();
  const Eigen::MatrixXcd light = perturbed_green(build_perturbed_inverse(grid, bath, params.mu, ell, h_value));
  const Eigen::MatrixXcd heavy =
      perturbed_green(build_perturbed_inverse(grid, bath, params.mu - params.U, ell, h_value));
  return (1.0 - params.w1) * light + params.w1 * heavy;
}

IndexedSeries numeric_delta_g(const MatsubaraGrid& grid, const BathFunction& bath,
                              const FkParams& params, int ell, double h_step) {
  if (!(h_step > 0.0)) throw InputError("h_step", "must be positive");
  if (ell == 0) throw StaticComponentError();
  const Eigen::MatrixXcd plus = fk_perturbed_green(grid, bath, params, ell, h_step);
  const Eigen::MatrixXcd minus = fk_perturbed_green(grid, bath, params, ell, -h_step);
  const double scale = -1.0 / (2.0 * h_step * grid.temperature());
  const PairWindow rows = truncated_pairs(grid, ell);
  IndexedSeries out{rows.first, {}};
  out.values.reserve(static_cast<std::size_t>(rows.count));
  for (int m = rows.first; m <= rows.last(); ++m) {
    const auto i = grid.offset(m), j = grid.offset(shifted_index(m, ell));
    out.values.push_back((plus(i, j) - minus(i, j)) * scale);
  }
  return out;
}

double max_off_selection(const Eigen::MatrixXcd& green, int ell) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < green.cols(); ++j)
    for (Eigen::Index i = 0; i < green.rows(); ++i) {
      const auto gap = j - i;
      if (gap == 0 || gap == ell) continue;
      worst = std::max(worst, std::abs(green(i, j)));
    }
  return worst;
}

OracleReport compare_delta_g(const MatsubaraGrid& grid, int ell, const IndexedSeries& numeric,
                             const IndexedSeries& analytic, double tolerance) {
  OracleReport report;
  report.ell = ell;
  report.tolerance = tolerance;
  report.rows.reserve(numeric.values.size());
  for (int m = numeric.first; m <= numeric.last(); ++m) {
    OracleRow row;
    row.m = m;
    row.numeric = numeric.at(m);
    if (!analytic.contains(m)) throw InputError("analytic", "missing coefficient for m = " + std::to_string(m));
    row.analytic = analytic.at(m);
    row.deviation = std::abs(row.numeric - row.analytic) / std::max(1.0, std::abs(row.analytic));
    row.edge = is_edge(grid, ell, m);
    if (row.edge) {
      report.max_edge_deviation = std::max(report.max_edge_deviation, row.deviation);
    } else {
      report.max_deviation = std::max(report.max_deviation, row.deviation);
      if (!(row.deviation <= tolerance)) report.failing.push_back(m);
    }
    report.rows.push_back(row);
  }
  report.passed = report.failing.empty();
  return report;
}

OracleReport oracle_report(const MatsubaraGrid& grid, const BathFunction& bath,
                           const FkParams& params, int ell, double h_step, double tolerance) {
  const FkEquilibrium eq(grid, bath, params);
  const PairWindow rows = truncated_pairs(grid, ell);
  const IndexedSeries analytic = delta_g_coefficient(eq, ell, rows);

  OracleReport report = compare_delta_g(grid, ell, numeric_delta_g(grid, bath, params, ell, h_step),
                                        analytic, tolerance);
  report.h_step = h_step;
  const OracleReport halved =
      compare_delta_g(grid, ell, numeric_delta_g(grid, bath, params, ell, 0.5 * h_step), analytic, tolerance);
  report.richardson_ratio = report.max_deviation / halved.max_deviation;
  return report;
}

}  // namespace fksusc
