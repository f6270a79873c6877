#include "fksusc/fk_equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "fksusc/errors.hpp"

namespace fksusc {

namespace {

complex checked_reciprocal(complex denominator, const char* what, int m) {
  if (denominator == complex{}) throw SingularError(what, m);
  return 1.0 / denominator;
}

}  // namespace

complex sector_green(const MatsubaraGrid& grid, const BathFunction& bath, double mu_eff, int m) {
  return checked_reciprocal(inverse_free_propagator(grid, bath, mu_eff, m), "singular sector propagator", m);
}

std::vector<complex> sector_green(const MatsubaraGrid& grid, const BathFunction& bath,
                                  double mu_eff) {
  std::vector<complex> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (int m = grid.first(); m <= grid.last(); ++m) out.push_back(sector_green(grid, bath, mu_eff, m));
  return out;
}

complex fk_green_eq(const MatsubaraGrid& grid, const BathFunction& bath, const FkParams& params,
                    int m) {
  const complex light = sector_green(grid, bath, params.mu, m);
  const complex heavy = sector_green(grid, bath, params.mu - params.U, m);
  return (1.0 - params.w1) * light + params.w1 * heavy;
}

std::vector<complex> fk_green_eq(const MatsubaraGrid& grid, const BathFunction& bath,
                                 const FkParams& params) {
  std::vector<complex> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (int m = grid.first(); m <= grid.last(); ++m) out.push_back(fk_green_eq(grid, bath, params, m));
  return out;
}

complex fk_sigma_eq(const MatsubaraGrid& grid, const BathFunction& bath, const FkParams& params,
                    int m) {
  const double w = params.w1;
  const double U = params.U;
  const complex denominator = inverse_free_propagator(grid, bath, params.mu - (1.0 - w) * U, m);
  return U * w + w * (1.0 - w) * U * U * checked_reciprocal(denominator, "singular self-energy", m);
}

std::vector<complex> fk_sigma_eq(const MatsubaraGrid& grid, const BathFunction& bath,
                                 const FkParams& params) {
  std::vector<complex> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (int m = grid.first(); m <= grid.last(); ++m) out.push_back(fk_sigma_eq(grid, bath, params, m));
  return out;
}

FkEquilibrium::FkEquilibrium(const MatsubaraGrid& grid, BathFunction bath, const FkParams& params)
    : grid_(grid), bath_(std::move(bath)), params_(params) {
  params_.validate();
  if (bath_.coverage().beta() != grid_.beta())
    throw InputError("bath", "bath temperature does not match the grid");
  g_ = fk_green_eq(grid_, bath_, params_);
  sigma_ = fk_sigma_eq(grid_, bath_, params_);
}

complex FkEquilibrium::green(int m) const {
  if (grid_.contains(m)) return g_[static_cast<std::size_t>(grid_.offset(m))];
  return fk_green_eq(grid_, bath_, params_, m);
}

complex FkEquilibrium::sigma(int m) const {
  if (grid_.contains(m)) return sigma_[static_cast<std::size_t>(grid_.offset(m))];
  return fk_sigma_eq(grid_, bath_, params_, m);
}

double FkEquilibrium::dyson_violation() const {
  double worst = 0.0;
  for (int m = grid_.first(); m <= grid_.last(); ++m) {
    const complex inverse = 1.0 / green(m);
    const complex dyson = light_inverse(m) - sigma(m);
    worst = std::max(worst, std::abs(inverse - dyson) / std::abs(inverse));
  }
  return worst;
}

}  // namespace fksusc
