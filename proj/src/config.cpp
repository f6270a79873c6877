#include "fksusc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "fksusc/errors.hpp"

namespace fksusc {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw InputError(join(prefix, key), "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw InputError(key, "expected a number");
  return v.get<double>();
}

int as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw InputError(key, "expected an integer");
  const auto i = v.get<long long>();
  if (i < -1'000'000'000 || i > 1'000'000'000) throw InputError(key, "integer out of range");
  return static_cast<int>(i);
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw InputError(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw InputError(key, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& key) {
  if (!v.is_array()) throw InputError(key, "expected an array");
  return v;
}

double required_number(const json& obj, const char* key, const std::string& prefix = {}) {
  const json* v = find(obj, key);
  if (!v) throw InputError(join(prefix, key), "required key is missing");
  return as_number(*v, join(prefix, key));
}

template <typename T, typename Read>
void optional_value(const json& obj, const char* key, const std::string& prefix, T& out, Read read) {
  if (const json* v = find(obj, key)) out = read(*v, join(prefix, key));
}

std::vector<double> number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  for (const json& e : as_array(v, key)) out.push_back(as_number(e, key));
  return out;
}

std::vector<int> integer_list(const json& v, const std::string& key) {
  std::vector<int> out;
  for (const json& e : as_array(v, key)) out.push_back(as_integer(e, key));
  return out;
}

BathKind bath_kind_from(const std::string& name, const std::string& key) {
  for (BathKind k : {BathKind::atomic, BathKind::single_level, BathKind::dmft_bethe, BathKind::table})
    if (to_string(k) == name) return k;
  throw InputError(key, "unknown bath kind '" + name + "'");
}

BathSpec parse_bath(const json& v, const std::filesystem::path& base_dir) {
  BathSpec spec;
  if (v.is_string()) {
    spec.kind = bath_kind_from(v.get<std::string>(), "bath");
    if (spec.kind == BathKind::table) throw InputError("bath.path", "table bath requires a path");
    return spec;
  }
  if (!v.is_object()) throw InputError("bath", "expected a kind name or an object");
  const json* kind = find(v, "kind");
  if (!kind) throw InputError("bath.kind", "required key is missing");
  spec.kind = bath_kind_from(as_string(*kind, "bath.kind"), "bath.kind");
  switch (spec.kind) {
    case BathKind::atomic:
      reject_unknown(v, "bath", {"kind"});
      break;
    case BathKind::single_level:
      reject_unknown(v, "bath", {"kind", "V", "eps_b"});
      spec.coupling = required_number(v, "V", "bath");
      spec.level = required_number(v, "eps_b", "bath");
      break;
    case BathKind::dmft_bethe:
      reject_unknown(v, "bath", {"kind", "t_star", "tol", "max_iter", "mixing"});
      spec.dmft.t_star = required_number(v, "t_star", "bath");
      optional_value(v, "tol", "bath", spec.dmft.tol, as_number);
      optional_value(v, "max_iter", "bath", spec.dmft.max_iter, as_integer);
      optional_value(v, "mixing", "bath", spec.dmft.mixing, as_number);
      break;
    case BathKind::table: {
      reject_unknown(v, "bath", {"kind", "path"});
      const json* path = find(v, "path");
      if (!path) throw InputError("bath.path", "required key is missing");
      spec.path = as_string(*path, "bath.path");
      if (spec.path.is_relative() && !base_dir.empty()) spec.path = base_dir / spec.path;
      break;
    }
  }
  return spec;
}

OutputFormat format_from(const std::string& name, const std::string& key) {
  for (OutputFormat f : {OutputFormat::tabular, OutputFormat::structured, OutputFormat::both})
    if (to_string(f) == name) return f;
  throw InputError(key, "expected tabular, structured or both");
}

void check_beta(double beta, const std::string& key) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError(key, "must be finite and strictly positive");
}

void check_w1(double w1, const std::string& key) {
  if (!(w1 >= 0.0 && w1 <= 1.0)) throw InputError(key, "must lie in [0, 1]");
}

void check_finite(double x, const std::string& key) {
  if (!std::isfinite(x)) throw InputError(key, "must be finite");
}

}  // namespace

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::tabular: return "tabular";
    case OutputFormat::structured: return "structured";
    case OutputFormat::both: return "both";
  }
  return "unknown";
}

void validate(const RunConfig& c) {
  check_beta(c.beta, "beta");
  check_finite(c.params.mu, "mu");
  check_finite(c.params.U, "U");
  check_w1(c.params.w1, "w1");
  if (c.ell.empty()) throw InputError("ell", "at least one bosonic index is required");
  int max_ell = 0;
  for (int l : c.ell) {
    if (l == 0) throw InputError("ell", "the static component ell = 0 is not supported");
    max_ell = std::max(max_ell, std::abs(l));
  }
  const auto check_cutoff = [&](int n_cut, const std::string& key) {
    if (n_cut < 1) throw InputError(key, "must be a positive integer");
    if (n_cut < 4 * max_ell)
      throw InputError(key, "must be at least 4 max|ell| = " + std::to_string(4 * max_ell));
  };
  check_cutoff(c.n_cut, "n_cut");
  if (c.assemble.routes.empty()) throw InputError("routes", "at least one route is required");

  switch (c.bath.kind) {
    case BathKind::single_level:
      check_finite(c.bath.coupling, "bath.V");
      check_finite(c.bath.level, "bath.eps_b");
      break;
    case BathKind::dmft_bethe:
      check_finite(c.bath.dmft.t_star, "bath.t_star");
      if (!(c.bath.dmft.tol > 0.0)) throw InputError("bath.tol", "must be positive");
      if (c.bath.dmft.max_iter < 1) throw InputError("bath.max_iter", "must be at least 1");
      if (!(c.bath.dmft.mixing > 0.0 && c.bath.dmft.mixing <= 1.0))
        throw InputError("bath.mixing", "must lie in (0, 1]");
      break;
    case BathKind::table:
      if (c.bath.path.empty()) throw InputError("bath.path", "must not be empty");
      break;
    case BathKind::atomic:
      break;
  }

  if (!(c.oracle.h_step > 0.0)) throw InputError("oracle.h_step", "must be positive");
  if (!(c.oracle.tolerance > 0.0)) throw InputError("oracle.tolerance", "must be positive");
  if (c.output.stem.empty()) throw InputError("output.stem", "must not be empty");
  if (c.workers < 1) throw InputError("workers", "must be at least 1");

  for (double b : c.sweep.beta) check_beta(b, "sweep.beta");
  for (double x : c.sweep.mu) check_finite(x, "sweep.mu");
  for (double x : c.sweep.U) check_finite(x, "sweep.U");
  for (double w : c.sweep.w1) check_w1(w, "sweep.w1");
  for (int n : c.sweep.n_cut) check_cutoff(n, "sweep.n_cut");
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw InputError("", "configuration must be a JSON object");
  reject_unknown(doc, "", {"beta", "mu", "U", "w1", "bath", "n_cut", "ell", "routes", "bse_solver",
                           "oracle", "output", "sweep", "workers"});
  RunConfig c;
  c.beta = required_number(doc, "beta");
  c.params.mu = required_number(doc, "mu");
  c.params.U = required_number(doc, "U");
  c.params.w1 = required_number(doc, "w1");

  const json* bath = find(doc, "bath");
  if (!bath) throw InputError("bath", "required key is missing");
  c.bath = parse_bath(*bath, base_dir);

  const json* ell = find(doc, "ell");
  if (!ell) throw InputError("ell", "required key is missing");
  c.ell = integer_list(*ell, "ell");

  optional_value(doc, "n_cut", "", c.n_cut, as_integer);
  optional_value(doc, "workers", "", c.workers, as_integer);

  if (const json* routes = find(doc, "routes")) {
    c.assemble.routes.clear();
    for (const json& r : as_array(*routes, "routes")) {
      const auto route = route_from_string(as_string(r, "routes"));
      if (!route) throw InputError("routes", "unknown route '" + r.get<std::string>() + "'");
      if (std::find(c.assemble.routes.begin(), c.assemble.routes.end(), *route) != c.assemble.routes.end())
        throw InputError("routes", "duplicate route '" + r.get<std::string>() + "'");
      c.assemble.routes.push_back(*route);
    }
  }
  if (const json* solver = find(doc, "bse_solver")) {
    const auto s = bse_solver_from_string(as_string(*solver, "bse_solver"));
    if (!s) throw InputError("bse_solver", "expected dense or diagonal");
    c.assemble.bse_solver = *s;
  }

  if (const json* oracle = find(doc, "oracle")) {
    if (!oracle->is_object()) throw InputError("oracle", "expected an object");
    reject_unknown(*oracle, "oracle", {"enabled", "h_step", "tolerance"});
    optional_value(*oracle, "enabled", "oracle", c.oracle.enabled, as_bool);
    optional_value(*oracle, "h_step", "oracle", c.oracle.h_step, as_number);
    optional_value(*oracle, "tolerance", "oracle", c.oracle.tolerance, as_number);
  }

  if (const json* output = find(doc, "output")) {
    if (!output->is_object()) throw InputError("output", "expected an object");
    reject_unknown(*output, "output", {"dir", "stem", "format"});
    if (const json* dir = find(*output, "dir")) c.output.dir = as_string(*dir, "output.dir");
    optional_value(*output, "stem", "output", c.output.stem, as_string);
    if (const json* format = find(*output, "format"))
      c.output.format = format_from(as_string(*format, "output.format"), "output.format");
  }

  if (const json* sweep = find(doc, "sweep")) {
    if (!sweep->is_object()) throw InputError("sweep", "expected an object");
    reject_unknown(*sweep, "sweep", {"beta", "mu", "U", "w1", "n_cut"});
    optional_value(*sweep, "beta", "sweep", c.sweep.beta, number_list);
    optional_value(*sweep, "mu", "sweep", c.sweep.mu, number_list);
    optional_value(*sweep, "U", "sweep", c.sweep.U, number_list);
    optional_value(*sweep, "w1", "sweep", c.sweep.w1, number_list);
    optional_value(*sweep, "n_cut", "sweep", c.sweep.n_cut, integer_list);
  }

  validate(c);
  return c;
}

RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config", "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.parent_path());
}

json config_to_json(const RunConfig& c) {
  json bath = {{"kind", to_string(c.bath.kind)}};
  switch (c.bath.kind) {
    case BathKind::single_level:
      bath["V"] = c.bath.coupling;
      bath["eps_b"] = c.bath.level;
      break;
    case BathKind::dmft_bethe:
      bath["t_star"] = c.bath.dmft.t_star;
      bath["tol"] = c.bath.dmft.tol;
      bath["max_iter"] = c.bath.dmft.max_iter;
      bath["mixing"] = c.bath.dmft.mixing;
      break;
    case BathKind::table:
      bath["path"] = c.bath.path.string();
      break;
    case BathKind::atomic:
      break;
  }
  json routes = json::array();
  for (Route r : c.assemble.routes) routes.push_back(to_string(r));
  json sweep = json::object();
  if (!c.sweep.beta.empty()) sweep["beta"] = c.sweep.beta;
  if (!c.sweep.mu.empty()) sweep["mu"] = c.sweep.mu;
  if (!c.sweep.U.empty()) sweep["U"] = c.sweep.U;
  if (!c.sweep.w1.empty()) sweep["w1"] = c.sweep.w1;
  if (!c.sweep.n_cut.empty()) sweep["n_cut"] = c.sweep.n_cut;
  return {
      {"beta", c.beta},
      {"mu", c.params.mu},
      {"U", c.params.U},
      {"w1", c.params.w1},
      {"bath", bath},
      {"n_cut", c.n_cut},
      {"ell", c.ell},
      {"routes", routes},
      {"bse_solver", to_string(c.assemble.bse_solver)},
      {"oracle", {{"enabled", c.oracle.enabled}, {"h_step", c.oracle.h_step}, {"tolerance", c.oracle.tolerance}}},
      {"output", {{"dir", c.output.dir.string()}, {"stem", c.output.stem}, {"format", to_string(c.output.format)}}},
      {"sweep", sweep},
      {"workers", c.workers},
  };
}

}  // namespace fksusc
