#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fksusc/config.hpp"
#include "fksusc/oracle.hpp"
#include "fksusc/response.hpp"

namespace fksusc {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int config_rejected = 2;
inline constexpr int numerical_failure = 3;
inline constexpr int oracle_failure = 4;
}  // namespace exit_code

struct DmftTrace {
  int iterations = 0;
  std::vector<double> residuals;
};

struct StageError {
  std::string stage;  // "bath", "equilibrium", "response", "oracle"
  std::string message;
  int exit_code = exit_code::numerical_failure;
};

struct PointRecord {
  double beta = 0.0;
  int n_cut = 0;
  FkParams params;
  std::optional<DmftTrace> dmft;
  std::vector<SusceptibilityResult> susceptibilities;
  std::vector<OracleReport> oracle;
  std::vector<StageError> errors;
  double seconds = 0.0;
};

inline constexpr int kRecordVersion = 1;

struct RunRecord {
  int version = kRecordVersion;
  std::string mode = "run";
  RunConfig config;
  std::vector<PointRecord> points;

  /// 0, or 3 for any numerical failure, else 4 for any oracle tolerance failure.
  int exit_code() const;
};

/// Bath coverage needed so that every m + ell of every pair window is tabulated.
int required_bath_coverage(int n_cut, const std::vector<int>& ells);

/// Builds the bath for one parameter point, widened to `coverage` indices.
BathFunction build_bath(const BathSpec& spec, double beta, int coverage, const FkParams& params,
                        std::optional<DmftTrace>* trace = nullptr);

/// bath -> equilibrium -> assemble per ell -> optional oracle, for one point.
/// Stage failures are captured in the record.
PointRecord run_point(const RunConfig& config, double beta, int n_cut, const FkParams& params,
                      bool with_response, bool with_oracle);

RunRecord run(const RunConfig& config);

/// One config per point of the cartesian product of the sweep lists.
std::vector<RunConfig> expand_sweep(const RunConfig& config);

/// Runs every sweep point on up to `workers` threads; record order follows expand_sweep.
RunRecord sweep(const RunConfig& config, int workers);

/// Oracle-only: the configured point, plus `draws` randomized points from `seed`.
RunRecord run_oracle(const RunConfig& config, std::optional<std::uint64_t> seed, int draws);

}  // namespace fksusc
