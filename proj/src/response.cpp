#include "fksusc/response.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fksusc/errors.hpp"

namespace fksusc {

namespace {

constexpr double kDegenerateGap = 1e-14;
constexpr double kMaxCondition = 1e14;

int floor_div2(int x) { return (x >= 0) ? x / 2 : -((-x + 1) / 2); }

void require_dynamic(int ell) {
  if (ell == 0) throw StaticComponentError();
}

template <typename F>
IndexedSeries tabulate(const PairWindow& window, F&& f) {
  IndexedSeries out{window.first, {}};
  out.values.reserve(static_cast<std::size_t>(window.count));
  for (int m = window.first; m <= window.last(); ++m) out.values.push_back(f(m));
  return out;
}

void require_nonzero(complex value, const char* what, int m) {
  if (value == complex{}) throw SingularError(what, m);
}

}  // namespace

complex IndexedSeries::sum() const { return std::accumulate(values.begin(), values.end(), complex{}); }

PairWindow pair_window(const MatsubaraGrid& grid, int ell) {
  // smallest m with 2m + 1 + ell > -2 n_cut, largest with 2m + 1 + ell < 2 n_cut
  const int first = floor_div2(-2 * grid.n_cut() - 1 - ell) + 1;
  const int last = -floor_div2(-(2 * grid.n_cut() - 1 - ell)) - 1;
  return {first, last - first + 1};
}

BareBubble bare_bubble(const FkEquilibrium& eq, int ell) {
  require_dynamic(ell);
  return {ell, tabulate(pair_window(eq.grid(), ell),
                        [&](int m) { return -eq.green(m) * eq.green(shifted_index(m, ell)); })};
}

complex vertex_ratio_expanded(const FkEquilibrium& eq, int m, int n) {
  const double w = eq.params().w1;
  const double U = eq.params().U;
  const double numerator = U * U * w * (1.0 - w);
  if (numerator == 0.0) return {};
  const complex cm = eq.light_inverse(m) - (1.0 - w) * U;
  const complex cn = eq.light_inverse(n) - (1.0 - w) * U;
  const complex denominator = eq.green(m) * eq.green(n) * (cm * cn + numerator);
  require_nonzero(denominator, "singular vertex denominator", m);
  return numerator / denominator;
}

IndexedSeries delta_sigma_coefficient(const FkEquilibrium& eq, int ell) {
  require_dynamic(ell);
  return tabulate(pair_window(eq.grid(), ell), [&](int m) {
    const int n = shifted_index(m, ell);
    const complex gm = eq.green(m), gn = eq.green(n);
    const complex gap = gm - gn;
    if (std::abs(gap) < kDegenerateGap * std::max(std::abs(gm), std::abs(gn)))
      return vertex_ratio_expanded(eq, m, n);
    return (eq.sigma(m) - eq.sigma(n)) / gap;
  });
}

DiagonalVertex fk_vertex(const FkEquilibrium& eq, int ell) {
  IndexedSeries ratio = delta_sigma_coefficient(eq, ell);
  const double beta = eq.grid().beta();
  for (complex& v : ratio.values) v *= beta;
  return {ell, std::move(ratio)};
}

Eigen::MatrixXcd dense_vertex(const DiagonalVertex& vertex) {
  const auto n = static_cast<Eigen::Index>(vertex.series.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = vertex.series.values[static_cast<std::size_t>(i)];
  return out;
}

ResolvedSusceptibility bse_solve_general(const BareBubble& chi0, const Eigen::MatrixXcd& vertex,
                                         double temperature) {
  require_dynamic(chi0.ell);
  const auto n = static_cast<Eigen::Index>(chi0.series.size());
  if (vertex.rows() != n || vertex.cols() != n)
    throw InputError("vertex", "dense vertex must be square over the bubble's index run");

  const Eigen::Map<const Eigen::VectorXcd> rhs(chi0.series.values.data(), n);
  Eigen::MatrixXcd system = temperature * (rhs.asDiagonal() * vertex);
  system.diagonal().array() += 1.0;

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= kMaxCondition)) throw IllConditionedError("singular Bethe-Salpeter system", condition);

  const Eigen::VectorXcd chi = lu.solve(rhs);
  const double scale = std::max(rhs.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  ResolvedSusceptibility out;
  out.ell = chi0.ell;
  out.series.first = chi0.series.first;
  out.series.values.assign(chi.data(), chi.data() + n);
  out.residual = (system * chi - rhs).cwiseAbs().maxCoeff() / scale;
  out.condition = condition;
  return out;
}

ResolvedSusceptibility bse_solve_diagonal(const BareBubble& chi0, const DiagonalVertex& vertex,
                                          double temperature) {
  require_dynamic(chi0.ell);
  if (vertex.series.first != chi0.series.first || vertex.series.size() != chi0.series.size())
    throw InputError("vertex", "vertex and bubble index runs differ");
  ResolvedSusceptibility out;
  out.ell = chi0.ell;
  out.series.first = chi0.series.first;
  out.series.values.reserve(chi0.series.values.size());
  double residual = 0.0, scale = std::numeric_limits<double>::min();
  for (int i = 0; i < chi0.series.size(); ++i) {
    const complex c0 = chi0.series.values[static_cast<std::size_t>(i)];
    const complex kernel = c0 * temperature * vertex.series.values[static_cast<std::size_t>(i)];
    const complex denominator = 1.0 + kernel;
    require_nonzero(denominator, "two-particle divergence", chi0.series.first + i);
    const complex chi = c0 / denominator;
    residual = std::max(residual, std::abs(chi + kernel * chi - c0));
    scale = std::max(scale, std::abs(c0));
    out.series.values.push_back(chi);
  }
  out.residual = residual / scale;
  return out;
}

IndexedSeries delta_g_coefficient(const FkEquilibrium& eq, int ell) {
  return delta_g_coefficient(eq, ell, pair_window(eq.grid(), ell));
}

IndexedSeries delta_g_coefficient(const FkEquilibrium& eq, int ell, const PairWindow& indices) {
  require_dynamic(ell);
  const double U = eq.params().U;
  const double w = eq.params().w1;
  return tabulate(indices, [&](int m) {
    const complex am = eq.light_inverse(m);
    const complex an = eq.light_inverse(shifted_index(m, ell));
    const complex bm = am - U, bn = an - U;
    const complex numerator = am * an - U * (1.0 - w) * (am + an - U);
    const complex denominator = am * an * bm * bn;
    require_nonzero(denominator, "singular propagator factor", m);
    return numerator / denominator;
  });
}

complex chi_closed_form(const FkEquilibrium& eq, int ell) {
  return -eq.grid().temperature() * delta_g_coefficient(eq, ell).sum();
}

complex chi_direct(const FkEquilibrium& eq, int ell) {
  require_dynamic(ell);
  const double U = eq.params().U;
  const double w = eq.params().w1;
  const PairWindow window = pair_window(eq.grid(), ell);
  complex sum{};
  for (int m = window.first; m <= window.last(); ++m) {
    const complex am = eq.light_inverse(m);
    const complex an = eq.light_inverse(shifted_index(m, ell));
    const complex light = am * an;
    const complex heavy = (am - U) * (an - U);
    require_nonzero(light, "singular light-sector propagator", m);
    require_nonzero(heavy, "singular heavy-sector propagator", m);
    sum += (1.0 - w) / light + w / heavy;
  }
  return -eq.grid().temperature() * sum;
}

double tail_estimate(const MatsubaraGrid& grid, int ell) {
  require_dynamic(ell);
  // 1/(s_m s_{m+ell}) = (a_m - a_{m+ell}) / (2 ell), s_m = 2m + 1, a_m = 1/s_m
  const auto a = [](int m) { return 1.0 / (2.0 * m + 1.0); };
  const PairWindow window = pair_window(grid, ell);
  const int upper = window.last() + 1;
  const int lower = window.first - 1;
  double telescoped = 0.0;
  if (ell > 0) {
    for (int k = 0; k < ell; ++k) telescoped += a(upper + k);
    for (int k = 1; k <= ell; ++k) telescoped -= a(lower + k);
  } else {
    const int p = -ell;
    for (int k = 1; k <= p; ++k) telescoped -= a(upper - k);
    for (int k = 0; k < p; ++k) telescoped += a(lower - k);
  }
  const double sum = telescoped / (2.0 * ell);
  return std::abs(grid.beta() * sum / (std::numbers::pi * std::numbers::pi));
}

std::string_view to_string(Route route) {
  switch (route) {
    case Route::bse: return "bse";
    case Route::closed: return "closed";
    case Route::direct: return "direct";
  }
  return "unknown";
}

std::optional<Route> route_from_string(std::string_view name) {
  for (Route r : {Route::bse, Route::closed, Route::direct})
    if (to_string(r) == name) return r;
  return std::nullopt;
}

std::string_view to_string(BseSolver solver) {
  return solver == BseSolver::dense ? "dense" : "diagonal";
}

std::optional<BseSolver> bse_solver_from_string(std::string_view name) {
  if (name == "dense") return BseSolver::dense;
  if (name == "diagonal") return BseSolver::diagonal;
  return std::nullopt;
}

const RouteOutcome* SusceptibilityResult::find(Route route) const {
  for (const RouteOutcome& r : routes)
    if (r.route == route) return &r;
  return nullptr;
}

std::optional<complex> SusceptibilityResult::value(Route route) const {
  const RouteOutcome* r = find(route);
  return r ? r->value : std::nullopt;
}

bool SusceptibilityResult::ok() const {
  return std::all_of(routes.begin(), routes.end(), [](const RouteOutcome& r) { return r.value.has_value(); });
}

double relative_deviation(complex a, complex b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

SusceptibilityResult assemble(const FkEquilibrium& eq, int ell, const AssembleOptions& options) {
  require_dynamic(ell);
  SusceptibilityResult result;
  result.ell = ell;
  result.n_cut = eq.grid().n_cut();
  result.window = pair_window(eq.grid(), ell);
  result.tail_estimate = tail_estimate(eq.grid(), ell);
  const double temperature = eq.grid().temperature();

  for (Route route : options.routes) {
    if (result.find(route)) continue;
    RouteOutcome outcome;
    outcome.route = route;
    const auto start = std::chrono::steady_clock::now();
    try {
      switch (route) {
        case Route::bse: {
          const BareBubble chi0 = bare_bubble(eq, ell);
          const DiagonalVertex vertex = fk_vertex(eq, ell);
          const ResolvedSusceptibility resolved =
              options.bse_solver == BseSolver::dense
                  ? bse_solve_general(chi0, dense_vertex(vertex), temperature)
                  : bse_solve_diagonal(chi0, vertex, temperature);
          outcome.value = resolved.total(temperature);
          result.bse_residual = resolved.residual;
          result.bse_condition = resolved.condition;
          break;
        }
        case Route::closed: outcome.value = chi_closed_form(eq, ell); break;
        case Route::direct: outcome.value = chi_direct(eq, ell); break;
      }
    } catch (const Error& e) {
      outcome.error = e.what();
    }
    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.routes.push_back(std::move(outcome));
  }

  for (std::size_t i = 0; i < result.routes.size(); ++i)
    for (std::size_t j = i + 1; j < result.routes.size(); ++j) {
      const auto& a = result.routes[i];
      const auto& b = result.routes[j];
      if (!a.value || !b.value) continue;
      const double d = relative_deviation(*a.value, *b.value);
      result.deviations.push_back({a.route, b.route, d});
      result.max_deviation = std::max(result.max_deviation, d);
    }
  return result;
}

}  // namespace fksusc
