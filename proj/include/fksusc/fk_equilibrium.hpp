#pragma once

#include <vector>

#include "fksusc/bath.hpp"
#include "fksusc/fk_params.hpp"
#include "fksusc/grid.hpp"

namespace fksusc {

/// i omega_m + mu_eff - lambda_m
inline complex inverse_free_propagator(const MatsubaraGrid& grid, const BathFunction& bath,
                                       double mu_eff, int m) {
  return fermionic_frequency(m, grid) + mu_eff - bath.at(m);
}

/// 1 / (i omega_m + mu_eff - lambda_m); throws SingularError on an exact zero.
complex sector_green(const MatsubaraGrid& grid, const BathFunction& bath, double mu_eff, int m);
std::vector<complex> sector_green(const MatsubaraGrid& grid, const BathFunction& bath,
                                  double mu_eff);

/// (1 - w1) / (i omega_m + mu - lambda_m) + w1 / (i omega_m + mu - U - lambda_m)
complex fk_green_eq(const MatsubaraGrid& grid, const BathFunction& bath, const FkParams& params,
                    int m);
std::vector<complex> fk_green_eq(const MatsubaraGrid& grid, const BathFunction& bath,
                                 const FkParams& params);

/// U w1 + w1 (1 - w1) U^2 / (i omega_m + mu - (1 - w1) U - lambda_m), closed form.
complex fk_sigma_eq(const MatsubaraGrid& grid, const BathFunction& bath, const FkParams& params,
                    int m);
std::vector<complex> fk_sigma_eq(const MatsubaraGrid& grid, const BathFunction& bath,
                                 const FkParams& params);

/// Equilibrium FK Green's function and self-energy on a grid window.
///
/// G and Sigma are stored over the window; `green(m)` / `sigma(m)` fall back to
/// the closed forms for indices outside it. Sigma is never obtained by inverting G.
class FkEquilibrium {
 public:
  FkEquilibrium(const MatsubaraGrid& grid, BathFunction bath, const FkParams& params);

  const MatsubaraGrid& grid() const noexcept { return grid_; }
  const BathFunction& bath() const noexcept { return bath_; }
  const FkParams& params() const noexcept { return params_; }

  complex green(int m) const;
  complex sigma(int m) const;
  complex bath_at(int m) const { return bath_.at(m); }
  /// i omega_m + mu - lambda_m
  complex light_inverse(int m) const { return inverse_free_propagator(grid_, bath_, params_.mu, m); }

  const std::vector<complex>& g() const noexcept { return g_; }
  const std::vector<complex>& sigma_values() const noexcept { return sigma_; }

  /// max_m |1/G_m - (i omega_m + mu - lambda_m - Sigma_m)| / |1/G_m| over the window.
  double dyson_violation() const;

 private:
  MatsubaraGrid grid_;
  BathFunction bath_;
  FkParams params_;
  std::vector<complex> g_;
  std::vector<complex> sigma_;
};

}  // namespace fksusc
