#include "fksusc/bath.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "fksusc/errors.hpp"
#include "fksusc/fk_equilibrium.hpp"

namespace fksusc {

std::string_view to_string(BathKind kind) {
  switch (kind) {
    case BathKind::atomic: return "atomic";
    case BathKind::single_level: return "single_level";
    case BathKind::dmft_bethe: return "dmft_bethe";
    case BathKind::table: return "table";
  }
  return "unknown";
}

void FkParams::validate() const {
  if (!std::isfinite(mu)) throw InputError("mu", "must be finite");
  if (!std::isfinite(U)) throw InputError("U", "must be finite");
  if (!(w1 >= 0.0 && w1 <= 1.0)) throw InputError("w1", "must lie in [0, 1]");
}

BathFunction::BathFunction(const MatsubaraGrid& coverage, BathKind kind, double coupling,
                           double level, std::vector<complex> values)
    : coverage_(coverage), kind_(kind), coupling_(coupling), level_(level), values_(std::move(values)) {}

BathFunction BathFunction::analytic(const MatsubaraGrid& coverage, BathKind kind, double coupling,
                                    double level) {
  BathFunction bath(coverage, kind, coupling, level, {});
  bath.values_.reserve(static_cast<std::size_t>(coverage.size()));
  for (int m = coverage.first(); m <= coverage.last(); ++m) bath.values_.push_back(bath.at(m));
  return bath;
}

BathFunction BathFunction::tabulated(const MatsubaraGrid& coverage, BathKind kind,
                                     std::vector<complex> values) {
  if (static_cast<int>(values.size()) != coverage.size())
    throw InputError("bath", "tabulated values do not match the coverage window");
  return BathFunction(coverage, kind, 0.0, 0.0, std::move(values));
}

complex BathFunction::at(int m) const {
  switch (kind_) {
    case BathKind::atomic:
      return {0.0, 0.0};
    case BathKind::single_level:
      return coupling_ * coupling_ / (fermionic_frequency(m, coverage_) - level_);
    default:
      if (!coverage_.contains(m)) throw CoverageError(std::string(to_string(kind_)) + " bath", m);
      return values_[static_cast<std::size_t>(coverage_.offset(m))];
  }
}

double BathFunction::conjugate_symmetry_violation() const {
  double worst = 0.0;
  for (int m = 0; m <= coverage_.last(); ++m) {
    const complex a = values_[static_cast<std::size_t>(coverage_.offset(m))];
    const complex b = values_[static_cast<std::size_t>(coverage_.offset(-m - 1))];
    worst = std::max(worst, std::abs(b - std::conj(a)));
  }
  return worst;
}

BathFunction atomic_bath(const MatsubaraGrid& grid) {
  return BathFunction::analytic(grid, BathKind::atomic, 0.0, 0.0);
}

BathFunction single_level_bath(const MatsubaraGrid& grid, double coupling, double level) {
  return BathFunction::analytic(grid, BathKind::single_level, coupling, level);
}

std::vector<complex> bethe_update(const BathFunction& bath, const FkParams& params, double t_star) {
  const MatsubaraGrid& grid = bath.coverage();
  const double scale = 0.25 * t_star * t_star;
  std::vector<complex> next(static_cast<std::size_t>(grid.size()));
  for (int m = grid.first(); m <= grid.last(); ++m)
    next[static_cast<std::size_t>(grid.offset(m))] = scale * fk_green_eq(grid, bath, params, m);
  return next;
}

DmftResult dmft_bethe_loop(const MatsubaraGrid& grid, const FkParams& params,
                           const DmftOptions& options) {
  params.validate();
  if (!(options.tol > 0.0)) throw InputError("bath.tol", "must be positive");
  if (options.max_iter < 1) throw InputError("bath.max_iter", "must be at least 1");
  if (!(options.mixing > 0.0 && options.mixing <= 1.0))
    throw InputError("bath.mixing", "must lie in (0, 1]");
  if (!std::isfinite(options.t_star)) throw InputError("bath.t_star", "must be finite");

  std::vector<complex> lambda(static_cast<std::size_t>(grid.size()), complex{});
  std::vector<double> residuals;
  double residual = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    BathFunction current = BathFunction::tabulated(grid, BathKind::dmft_bethe, lambda);
    const std::vector<complex> next = bethe_update(current, params, options.t_star);
    residual = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) residual = std::max(residual, std::abs(next[i] - lambda[i]));
    residuals.push_back(residual);
    if (residual <= options.tol) return {std::move(current), it, std::move(residuals)};
    for (std::size_t i = 0; i < next.size(); ++i)
      lambda[i] = (1.0 - options.mixing) * lambda[i] + options.mixing * next[i];
  }
  throw ConvergenceError("dmft_bethe_loop did not converge", residual, options.max_iter);
}

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

template <typename T>
bool parse_token(std::string_view token, T& out) {
  if (token.size() > 1 && token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace

BathFunction load_bath(const MatsubaraGrid& grid, std::istream& in) {
  struct Row {
    complex value;
    int line;
  };
  std::map<int, Row> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream fields(line);
    std::string tm, tre, tim, extra;
    fields >> tm >> tre >> tim;
    int m = 0;
    double re = 0.0, im = 0.0;
    if (tim.empty() || (fields >> extra) || !parse_token(tm, m) || !parse_token(tre, re) ||
        !parse_token(tim, im) || !std::isfinite(re) || !std::isfinite(im))
      throw InputError("bath", "line " + std::to_string(line_no) + ": expected three columns 'm re im'");
    auto [it, inserted] = rows.emplace(m, Row{{re, im}, line_no});
    if (!inserted)
      throw InputError("bath", "line " + std::to_string(line_no) + ": duplicate index " +
                                   std::to_string(m) + " (first seen on line " +
                                   std::to_string(it->second.line) + ")");
  }

  int extent = grid.n_cut();
  if (!rows.empty()) extent = std::max({extent, rows.rbegin()->first + 1, -rows.begin()->first});
  const MatsubaraGrid coverage(grid.beta(), extent);
  std::vector<complex> values(static_cast<std::size_t>(coverage.size()));
  for (int m = coverage.first(); m <= coverage.last(); ++m) {
    auto it = rows.find(m);
    if (it == rows.end()) throw InputError("bath", "missing index " + std::to_string(m));
    values[static_cast<std::size_t>(coverage.offset(m))] = it->second.value;
  }
  for (int m = 0; m <= coverage.last(); ++m) {
    const complex a = values[static_cast<std::size_t>(coverage.offset(m))];
    const complex b = values[static_cast<std::size_t>(coverage.offset(-m - 1))];
    if (std::abs(b - std::conj(a)) > 1e-12)
      throw InputError("bath", "line " + std::to_string(rows.at(-m - 1).line) + ": index " +
                                   std::to_string(-m - 1) + " is not the conjugate of index " +
                                   std::to_string(m));
  }
  return BathFunction::tabulated(coverage, BathKind::table, std::move(values));
}

BathFunction load_bath(const MatsubaraGrid& grid, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("bath.path", "cannot open " + path.string());
  return load_bath(grid, in);
}

void write_bath(std::ostream& out, const BathFunction& bath) {
  const MatsubaraGrid& grid = bath.coverage();
  out << "# m re(lambda) im(lambda); beta=" << format_double(grid.beta())
      << " kind=" << to_string(bath.kind()) << '\n';
  for (int m = grid.first(); m <= grid.last(); ++m) {
    const complex v = bath.values()[static_cast<std::size_t>(grid.offset(m))];
    out << m << ' ' << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
  }
}

void write_bath(const std::filesystem::path& path, const BathFunction& bath) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write bath table " + path.string());
  write_bath(out, bath);
  if (!out) throw Error("failed writing bath table " + path.string());
}

}  // namespace fksusc
