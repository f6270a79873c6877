#include "fksusc/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include "fksusc/errors.hpp"

namespace fksusc {

namespace {

template <typename F>
bool capture(std::vector<StageError>& errors, const char* stage, F&& f) {
  try {
    f();
    return true;
  } catch (const InputError& e) {
    errors.push_back({stage, e.what(), exit_code::config_rejected});
  } catch (const Error& e) {
    errors.push_back({stage, e.what(), exit_code::numerical_failure});
  }
  return false;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int RunRecord::exit_code() const {
  bool config = false, numerical = false, oracle = false;
  for (const PointRecord& p : points) {
    for (const StageError& e : p.errors) {
      config |= e.exit_code == exit_code::config_rejected;
      numerical |= e.exit_code == exit_code::numerical_failure;
    }
    for (const SusceptibilityResult& s : p.susceptibilities) numerical |= !s.ok();
    for (const OracleReport& r : p.oracle) oracle |= !r.passed;
  }
  if (config) return exit_code::config_rejected;
  if (numerical) return exit_code::numerical_failure;
  if (oracle) return exit_code::oracle_failure;
  return exit_code::success;
}

int required_bath_coverage(int n_cut, const std::vector<int>& ells) {
  int max_ell = 0;
  for (int l : ells) max_ell = std::max(max_ell, std::abs(l));
  return n_cut + max_ell + 1;
}

BathFunction build_bath(const BathSpec& spec, double beta, int coverage, const FkParams& params,
                        std::optional<DmftTrace>* trace) {
  const MatsubaraGrid grid(beta, coverage);
  switch (spec.kind) {
    case BathKind::atomic:
      return atomic_bath(grid);
    case BathKind::single_level:
      return single_level_bath(grid, spec.coupling, spec.level);
    case BathKind::dmft_bethe: {
      DmftResult result = dmft_bethe_loop(grid, params, spec.dmft);
      if (trace) *trace = DmftTrace{result.iterations, std::move(result.residuals)};
      return std::move(result.bath);
    }
    case BathKind::table: {
      BathFunction bath = load_bath(MatsubaraGrid(beta, 1), spec.path);
      if (bath.coverage().n_cut() < coverage)
        throw InputError("bath.path", "table covers |m + 1/2| < " + std::to_string(bath.coverage().n_cut()) +
                                          " but n_cut + max|ell| + 1 = " + std::to_string(coverage) +
                                          " is required");
      return bath;
    }
  }
  throw InputError("bath.kind", "unsupported bath kind");
}

PointRecord run_point(const RunConfig& config, double beta, int n_cut, const FkParams& params,
                      bool with_response, bool with_oracle) {
  const auto start = std::chrono::steady_clock::now();
  PointRecord rec;
  rec.beta = beta;
  rec.n_cut = n_cut;
  rec.params = params;

  std::optional<BathFunction> bath;
  if (!capture(rec.errors, "bath", [&] {
        bath = build_bath(config.bath, beta, required_bath_coverage(n_cut, config.ell), params, &rec.dmft);
      })) {
    rec.seconds = seconds_since(start);
    return rec;
  }

  const MatsubaraGrid grid(beta, n_cut);
  if (with_response) {
    std::optional<FkEquilibrium> eq;
    if (capture(rec.errors, "equilibrium", [&] { eq.emplace(grid, *bath, params); })) {
      for (int ell : config.ell)
        capture(rec.errors, "response", [&] { rec.susceptibilities.push_back(assemble(*eq, ell, config.assemble)); });
    }
  }
  if (with_oracle) {
    for (int ell : config.ell)
      capture(rec.errors, "oracle", [&] {
        rec.oracle.push_back(oracle_report(grid, *bath, params, ell, config.oracle.h_step, config.oracle.tolerance));
      });
  }
  rec.seconds = seconds_since(start);
  return rec;
}

RunRecord run(const RunConfig& config) {
  RunRecord record;
  record.mode = "run";
  record.config = config;
  record.points.push_back(run_point(config, config.beta, config.n_cut, config.params, true, config.oracle.enabled));
  return record;
}

std::vector<RunConfig> expand_sweep(const RunConfig& config) {
  const auto or_base = [](const auto& list, auto base) {
    using T = std::decay_t<decltype(base)>;
    return list.empty() ? std::vector<T>{base} : std::vector<T>(list.begin(), list.end());
  };
  const auto betas = or_base(config.sweep.beta, config.beta);
  const auto mus = or_base(config.sweep.mu, config.params.mu);
  const auto us = or_base(config.sweep.U, config.params.U);
  const auto w1s = or_base(config.sweep.w1, config.params.w1);
  const auto cuts = or_base(config.sweep.n_cut, config.n_cut);

  std::vector<RunConfig> out;
  for (double beta : betas)
    for (double mu : mus)
      for (double U : us)
        for (double w1 : w1s)
          for (int n_cut : cuts) {
            RunConfig point = config;
            point.sweep = {};
            point.beta = beta;
            point.params = {mu, U, w1};
            point.n_cut = n_cut;
            out.push_back(std::move(point));
          }
  return out;
}

RunRecord sweep(const RunConfig& config, int workers) {
  const std::vector<RunConfig> points = expand_sweep(config);
  RunRecord record;
  record.mode = "sweep";
  record.config = config;
  record.points.resize(points.size());

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const RunConfig& p = points[i];
      record.points[i] = run_point(p, p.beta, p.n_cut, p.params, true, p.oracle.enabled);
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < std::min(n_threads, points.size()); ++t) pool.emplace_back(work);
  work();
  pool.clear();
  return record;
}

RunRecord run_oracle(const RunConfig& config, std::optional<std::uint64_t> seed, int draws) {
  RunRecord record;
  record.mode = "oracle";
  record.config = config;
  record.points.push_back(run_point(config, config.beta, config.n_cut, config.params, false, true));
  if (seed) {
    std::mt19937_64 rng(*seed);
    std::uniform_real_distribution<double> beta_dist(0.5, 20.0), energy(-2.0, 2.0), unit(0.0, 1.0);
    for (int d = 0; d < draws; ++d) {
      const double beta = beta_dist(rng);
      FkParams params;
      params.mu = energy(rng);
      params.U = energy(rng);
      params.w1 = unit(rng);
      record.points.push_back(run_point(config, beta, config.n_cut, params, false, true));
    }
  }
  return record;
}

}  // namespace fksusc
