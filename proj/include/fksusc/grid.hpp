#pragma once

#include <complex>
#include <numbers>

namespace fksusc {

using complex = std::complex<double>;

/// Temperature plus a symmetric fermionic index window {-n_cut, ..., n_cut-1}.
///
/// Frequencies are never materialized; they are pure functions of (m, beta),
/// so indices outside the window evaluate just as well as those inside.
class MatsubaraGrid {
 public:
  MatsubaraGrid(double beta, int n_cut);

  double beta() const noexcept { return beta_; }
  double temperature() const noexcept { return 1.0 / beta_; }
  int n_cut() const noexcept { return n_cut_; }

  int first() const noexcept { return -n_cut_; }
  int last() const noexcept { return n_cut_ - 1; }
  int size() const noexcept { return 2 * n_cut_; }
  bool contains(int m) const noexcept { return m >= -n_cut_ && m < n_cut_; }
  // position of m in window-ordered storage
  int offset(int m) const noexcept { return m + n_cut_; }

  bool operator==(const MatsubaraGrid&) const = default;

 private:
  double beta_;
  int n_cut_;
};

/// i pi T (2m + 1)
inline complex fermionic_frequency(int m, const MatsubaraGrid& grid) {
  return {0.0, std::numbers::pi * (2.0 * m + 1.0) / grid.beta()};
}

/// 2 i pi T ell
inline complex bosonic_frequency(int ell, const MatsubaraGrid& grid) {
  return {0.0, 2.0 * std::numbers::pi * ell / grid.beta()};
}

constexpr int shifted_index(int m, int ell) noexcept { return m + ell; }

}  // namespace fksusc
