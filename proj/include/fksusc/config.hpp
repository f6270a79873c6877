#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fksusc/bath.hpp"
#include "fksusc/fk_params.hpp"
#include "fksusc/response.hpp"

namespace fksusc {

struct BathSpec {
  BathKind kind = BathKind::atomic;
  double coupling = 0.0;  // single_level V
  double level = 0.0;     // single_level eps_b
  DmftOptions dmft;       // dmft_bethe
  std::filesystem::path path;  // table
};

struct OracleSettings {
  bool enabled = false;
  double h_step = 1e-5;
  double tolerance = 1e-6;
};

enum class OutputFormat { tabular, structured, both };
std::string_view to_string(OutputFormat format);

struct OutputSettings {
  std::filesystem::path dir = ".";
  std::string stem = "fksusc";
  OutputFormat format = OutputFormat::both;
};

/// Parameter lists for the cartesian sweep; an empty list keeps the base value.
struct SweepSpec {
  std::vector<double> beta;
  std::vector<double> mu;
  std::vector<double> U;
  std::vector<double> w1;
  std::vector<int> n_cut;

  bool empty() const noexcept {
    return beta.empty() && mu.empty() && U.empty() && w1.empty() && n_cut.empty();
  }
};

struct RunConfig {
  double beta = 1.0;
  FkParams params;
  BathSpec bath;
  int n_cut = 256;
  std::vector<int> ell;
  AssembleOptions assemble;
  OracleSettings oracle;
  OutputSettings output;
  SweepSpec sweep;
  int workers = 1;
};

/// Parses and validates a JSON configuration document.
///
/// Required keys: beta, mu, U, w1, bath, ell. Every other key takes the
/// default shown in `config_to_json`. Unknown keys, type mismatches and
/// invariant violations throw InputError naming the dotted key.
/// Relative bath table paths resolve against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Checks the cross-field invariants (beta > 0, 0 <= w1 <= 1, ell != 0,
/// n_cut >= 4 max|ell|, sweep values).
void validate(const RunConfig& config);

/// Full echo including every default.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace fksusc
