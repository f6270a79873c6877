#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "fksusc/fk_params.hpp"
#include "fksusc/grid.hpp"

namespace fksusc {

enum class BathKind { atomic, single_level, dmft_bethe, table };

std::string_view to_string(BathKind kind);

/// Equilibrium dynamical mean field lambda_m, diagonal in Matsubara space.
///
/// Analytic kinds (atomic, single_level) evaluate at any index. Tabulated kinds
/// (dmft_bethe, table) hold values on the window of `coverage()` and throw
/// CoverageError outside it. The coverage grid may be wider than the grid the
/// bath is later used with, which is how shifted indices m + ell stay exact.
class BathFunction {
 public:
  static BathFunction analytic(const MatsubaraGrid& coverage, BathKind kind, double coupling,
                               double level);
  static BathFunction tabulated(const MatsubaraGrid& coverage, BathKind kind,
                                std::vector<complex> values);

  complex at(int m) const;
  complex operator()(int m) const { return at(m); }

  BathKind kind() const noexcept { return kind_; }
  bool is_analytic() const noexcept {
    return kind_ == BathKind::atomic || kind_ == BathKind::single_level;
  }
  const MatsubaraGrid& coverage() const noexcept { return coverage_; }
  bool covers(int m) const noexcept { return is_analytic() || coverage_.contains(m); }
  /// Values over the coverage window, ordered by m ascending.
  std::span<const complex> values() const noexcept { return values_; }

  double coupling() const noexcept { return coupling_; }
  double level() const noexcept { return level_; }

  /// max_m |lambda_{-m-1} - conj(lambda_m)| over the coverage window.
  double conjugate_symmetry_violation() const;

 private:
  BathFunction(const MatsubaraGrid& coverage, BathKind kind, double coupling, double level,
               std::vector<complex> values);

  MatsubaraGrid coverage_;
  BathKind kind_;
  double coupling_ = 0.0;
  double level_ = 0.0;
  std::vector<complex> values_;
};

BathFunction atomic_bath(const MatsubaraGrid& grid);

/// lambda_m = V^2 / (i omega_m - eps_b)
BathFunction single_level_bath(const MatsubaraGrid& grid, double coupling, double level);

struct DmftOptions {
  double t_star = 1.0;
  double tol = 1e-10;
  int max_iter = 200;
  double mixing = 0.5;
};

struct DmftResult {
  BathFunction bath;
  int iterations = 0;
  // residual of the unmixed update, one entry per sweep
  std::vector<double> residuals;
};

/// Bethe-lattice (semicircular DOS) self-consistency lambda <- (t*^2/4) G[lambda]
/// with linear mixing. Converged when max_m |F(lambda) - lambda| <= tol; the
/// returned lambda is the iterate that satisfied the test.
///
/// Throws ConvergenceError carrying the last residual after max_iter sweeps.
DmftResult dmft_bethe_loop(const MatsubaraGrid& grid, const FkParams& params,
                           const DmftOptions& options);

/// One unmixed sweep of the self-consistency map; exposed for fixed-point checks.
std::vector<complex> bethe_update(const BathFunction& bath, const FkParams& params, double t_star);

/// Reads a bath table: rows "m re im", `#` comments. The rows must form a
/// contiguous symmetric range that includes the window of `grid`.
BathFunction load_bath(const MatsubaraGrid& grid, std::istream& in);
BathFunction load_bath(const MatsubaraGrid& grid, const std::filesystem::path& path);

/// Writes the coverage window, m ascending, shortest round-trip decimal form.
void write_bath(std::ostream& out, const BathFunction& bath);
void write_bath(const std::filesystem::path& path, const BathFunction& bath);

}  // namespace fksusc
