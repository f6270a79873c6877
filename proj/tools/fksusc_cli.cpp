// fksusc: Falicov-Kimball dynamical charge susceptibilities on the Matsubara axis.
//
//   fksusc run      --config cfg.json [--out dir] [--format tabular|structured|both]
//   fksusc sweep    --config cfg.json [--workers n]
//   fksusc oracle   --config cfg.json [--seed n] [--draws k]
//   fksusc validate --config cfg.json

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fksusc/errors.hpp"
#include "fksusc/record_io.hpp"
#include "fksusc/run.hpp"

namespace {

using namespace fksusc;

struct Options {
  std::string config;
  std::string out;
  std::string format;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  int draws = 10;
};

void print_summary(const RunRecord& record) {
  std::cout << std::setprecision(12);
  for (std::size_t i = 0; i < record.points.size(); ++i) {
    const PointRecord& p = record.points[i];
    std::cout << "point " << i << ": beta=" << p.beta << " mu=" << p.params.mu << " U=" << p.params.U
              << " w1=" << p.params.w1 << " n_cut=" << p.n_cut;
    if (p.dmft) std::cout << " dmft_iterations=" << p.dmft->iterations;
    std::cout << '\n';
    for (const SusceptibilityResult& s : p.susceptibilities) {
      std::cout << "  ell=" << s.ell;
      for (const RouteOutcome& r : s.routes) {
        std::cout << ' ' << to_string(r.route) << '=';
        if (r.value) std::cout << r.value->real() << (std::signbit(r.value->imag()) ? "" : "+") << r.value->imag() << 'i';
        else std::cout << "FAILED(" << r.error << ')';
      }
      std::cout << " max_dev=" << s.max_deviation << " tail=" << s.tail_estimate << '\n';
    }
    for (const OracleReport& r : p.oracle)
      std::cout << "  oracle ell=" << r.ell << " max_dev=" << r.max_deviation << " edge_dev=" << r.max_edge_deviation
                << " richardson=" << r.richardson_ratio << (r.passed ? " PASS" : " FAIL") << '\n';
    for (const StageError& e : p.errors) std::cout << "  error [" << e.stage << "] " << e.message << '\n';
  }
}

RunConfig load(const Options& opt) {
  RunConfig config = load_config(opt.config);
  if (!opt.out.empty()) config.output.dir = opt.out;
  if (!opt.format.empty()) {
    if (opt.format == "tabular") config.output.format = OutputFormat::tabular;
    else if (opt.format == "structured") config.output.format = OutputFormat::structured;
    else config.output.format = OutputFormat::both;
  }
  if (opt.workers > 0) config.workers = opt.workers;
  return config;
}

int finish(const RunRecord& record) {
  print_summary(record);
  try {
    for (const auto& path : emit(record, record.config.output.format, record.config.output.dir,
                                 record.config.output.stem))
      std::cerr << "wrote " << path.string() << '\n';
  } catch (const Error& e) {
    // keep the computation: dump the record where it can still be captured
    std::cerr << "fksusc: " << e.what() << "; record follows on stdout\n";
    std::cout << record_to_json(record).dump(2) << '\n';
    return exit_code::config_rejected;
  }
  return record.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Falicov-Kimball dynamical charge susceptibility"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides output.dir)");
    sub->add_option("--format", opt.format, "output format (overrides output.format)")
        ->check(CLI::IsMember({"tabular", "structured", "both"}));
    sub->add_option("--workers", opt.workers, "concurrent sweep points")->check(CLI::PositiveNumber);
  };

  CLI::App* run_cmd = app.add_subcommand("run", "full pipeline at the configured point");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "cartesian product over the sweep lists");
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "finite-difference verification only");
  CLI::App* validate_cmd = app.add_subcommand("validate", "check and echo the configuration");
  for (CLI::App* sub : {run_cmd, sweep_cmd, oracle_cmd, validate_cmd}) add_common(sub);
  oracle_cmd->add_option("--seed", opt.seed, "seed for additional randomized parameter draws");
  oracle_cmd->add_option("--draws", opt.draws, "number of randomized draws when --seed is given")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::config_rejected;
  }

  try {
    const RunConfig config = load(opt);
    if (*validate_cmd) {
      std::cout << config_to_json(config).dump(2) << '\n';
      return exit_code::success;
    }
    if (*run_cmd) return finish(run(config));
    if (*sweep_cmd) return finish(sweep(config, config.workers));
    if (*oracle_cmd) return finish(run_oracle(config, opt.seed, opt.draws));
  } catch (const InputError& e) {
    std::cerr << "fksusc: configuration rejected: " << e.what() << '\n';
    return exit_code::config_rejected;
  } catch (const Error& e) {
    std::cerr << "fksusc: " << e.what() << '\n';
    return exit_code::numerical_failure;
  }
  return exit_code::success;
}
