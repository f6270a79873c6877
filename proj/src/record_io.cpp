#include "fksusc/record_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "fksusc/errors.hpp"

namespace fksusc {

using nlohmann::json;

namespace {

// JSON has no non-finite numbers; spell them as strings so reloads stay exact
json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InputError("record", "unexpected numeric token '" + s + "'");
  }
  return v.get<double>();
}

std::string csv_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

Route route_of(const json& v) {
  const auto r = route_from_string(v.get<std::string>());
  if (!r) throw InputError("record", "unknown route " + v.dump());
  return *r;
}

json susceptibility_to_json(const SusceptibilityResult& s) {
  json routes = json::array();
  for (const RouteOutcome& r : s.routes) {
    json o = {{"route", to_string(r.route)}};
    if (r.value) {
      o["re"] = number(r.value->real());
      o["im"] = number(r.value->imag());
    } else {
      o["error"] = r.error;
    }
    routes.push_back(std::move(o));
  }
  json deviations = json::array();
  for (const RouteDeviation& d : s.deviations)
    deviations.push_back({{"a", to_string(d.a)}, {"b", to_string(d.b)}, {"value", number(d.value)}});
  json out = {{"ell", s.ell},
              {"n_cut", s.n_cut},
              {"window", {{"first", s.window.first}, {"count", s.window.count}}},
              {"tail_estimate", number(s.tail_estimate)},
              {"routes", routes},
              {"deviations", deviations},
              {"max_deviation", number(s.max_deviation)}};
  if (s.bse_residual) out["bse_residual"] = number(*s.bse_residual);
  if (s.bse_condition) out["bse_condition"] = number(*s.bse_condition);
  return out;
}

SusceptibilityResult susceptibility_from_json(const json& v) {
  SusceptibilityResult s;
  s.ell = v.at("ell").get<int>();
  s.n_cut = v.at("n_cut").get<int>();
  s.window = {v.at("window").at("first").get<int>(), v.at("window").at("count").get<int>()};
  s.tail_estimate = number(v.at("tail_estimate"));
  for (const json& r : v.at("routes")) {
    RouteOutcome o;
    o.route = route_of(r.at("route"));
    if (r.contains("re")) o.value = complex(number(r.at("re")), number(r.at("im")));
    else o.error = r.at("error").get<std::string>();
    s.routes.push_back(std::move(o));
  }
  for (const json& d : v.at("deviations"))
    s.deviations.push_back({route_of(d.at("a")), route_of(d.at("b")), number(d.at("value"))});
  s.max_deviation = number(v.at("max_deviation"));
  if (v.contains("bse_residual")) s.bse_residual = number(v.at("bse_residual"));
  if (v.contains("bse_condition")) s.bse_condition = number(v.at("bse_condition"));
  return s;
}

json oracle_to_json(const OracleReport& r) {
  json rows = json::array();
  for (const OracleRow& row : r.rows)
    rows.push_back({row.m, number(row.numeric.real()), number(row.numeric.imag()), number(row.analytic.real()),
                    number(row.analytic.imag()), number(row.deviation), row.edge});
  return {{"ell", r.ell},
          {"h_step", number(r.h_step)},
          {"tolerance", number(r.tolerance)},
          {"max_deviation", number(r.max_deviation)},
          {"max_edge_deviation", number(r.max_edge_deviation)},
          {"richardson_ratio", number(r.richardson_ratio)},
          {"passed", r.passed},
          {"failing", r.failing},
          {"columns", {"m", "re_numeric", "im_numeric", "re_analytic", "im_analytic", "deviation", "edge"}},
          {"rows", rows}};
}

OracleReport oracle_from_json(const json& v) {
  OracleReport r;
  r.ell = v.at("ell").get<int>();
  r.h_step = number(v.at("h_step"));
  r.tolerance = number(v.at("tolerance"));
  r.max_deviation = number(v.at("max_deviation"));
  r.max_edge_deviation = number(v.at("max_edge_deviation"));
  r.richardson_ratio = number(v.at("richardson_ratio"));
  r.passed = v.at("passed").get<bool>();
  r.failing = v.at("failing").get<std::vector<int>>();
  for (const json& row : v.at("rows"))
    r.rows.push_back({row.at(0).get<int>(), complex(number(row.at(1)), number(row.at(2))),
                      complex(number(row.at(3)), number(row.at(4))), number(row.at(5)), row.at(6).get<bool>()});
  return r;
}

std::string render(const std::function<void(std::ostream&)>& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

json record_to_json(const RunRecord& record) {
  json points = json::array();
  for (const PointRecord& p : record.points) {
    json errors = json::array();
    for (const StageError& e : p.errors)
      errors.push_back({{"stage", e.stage}, {"message", e.message}, {"exit_code", e.exit_code}});
    json sus = json::array();
    for (const SusceptibilityResult& s : p.susceptibilities) sus.push_back(susceptibility_to_json(s));
    json oracle = json::array();
    for (const OracleReport& r : p.oracle) oracle.push_back(oracle_to_json(r));
    json dmft = nullptr;
    if (p.dmft) {
      json residuals = json::array();
      for (double x : p.dmft->residuals) residuals.push_back(number(x));
      dmft = {{"iterations", p.dmft->iterations}, {"residuals", residuals}};
    }
    points.push_back({{"beta", number(p.beta)},
                      {"n_cut", p.n_cut},
                      {"mu", number(p.params.mu)},
                      {"U", number(p.params.U)},
                      {"w1", number(p.params.w1)},
                      {"dmft", dmft},
                      {"errors", errors},
                      {"susceptibilities", sus},
                      {"oracle", oracle}});
  }
  return {{"format", "fksusc-record"},
          {"version", record.version},
          {"mode", record.mode},
          {"exit_code", record.exit_code()},
          {"config", config_to_json(record.config)},
          {"points", points}};
}

RunRecord record_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "fksusc-record")
    throw InputError("record", "not an fksusc record");
  RunRecord record;
  record.version = doc.at("version").get<int>();
  if (record.version != kRecordVersion)
    throw InputError("record.version", "unsupported version " + std::to_string(record.version));
  record.mode = doc.at("mode").get<std::string>();
  record.config = parse_config(doc.at("config"));
  for (const json& v : doc.at("points")) {
    PointRecord p;
    p.beta = number(v.at("beta"));
    p.n_cut = v.at("n_cut").get<int>();
    p.params = {number(v.at("mu")), number(v.at("U")), number(v.at("w1"))};
    if (!v.at("dmft").is_null()) {
      DmftTrace trace;
      trace.iterations = v.at("dmft").at("iterations").get<int>();
      for (const json& x : v.at("dmft").at("residuals")) trace.residuals.push_back(number(x));
      p.dmft = std::move(trace);
    }
    for (const json& e : v.at("errors"))
      p.errors.push_back({e.at("stage").get<std::string>(), e.at("message").get<std::string>(),
                          e.at("exit_code").get<int>()});
    for (const json& s : v.at("susceptibilities")) p.susceptibilities.push_back(susceptibility_from_json(s));
    for (const json& r : v.at("oracle")) p.oracle.push_back(oracle_from_json(r));
    record.points.push_back(std::move(p));
  }
  return record;
}

json record_metadata(const RunRecord& record) {
  json points = json::array();
  for (const PointRecord& p : record.points) {
    json routes = json::array();
    for (const SusceptibilityResult& s : p.susceptibilities)
      for (const RouteOutcome& r : s.routes)
        routes.push_back({{"ell", s.ell}, {"route", to_string(r.route)}, {"seconds", r.seconds}});
    points.push_back({{"seconds", p.seconds}, {"routes", routes}});
  }
  return {{"format", "fksusc-metadata"}, {"version", record.version}, {"points", points}};
}

void write_tabular(std::ostream& out, const RunRecord& record) {
  out << "# fksusc-tabular v" << record.version
      << " columns=point,beta,n_cut,mu,U,w1,ell,route,re_chi,im_chi,tail_estimate,max_route_deviation,status\n";
  for (std::size_t i = 0; i < record.points.size(); ++i) {
    const PointRecord& p = record.points[i];
    for (const SusceptibilityResult& s : p.susceptibilities)
      for (const RouteOutcome& r : s.routes) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const complex v = r.value.value_or(complex(nan, nan));
        out << i << ',' << csv_number(p.beta) << ',' << p.n_cut << ',' << csv_number(p.params.mu) << ','
            << csv_number(p.params.U) << ',' << csv_number(p.params.w1) << ',' << s.ell << ',' << to_string(r.route)
            << ',' << csv_number(v.real()) << ',' << csv_number(v.imag()) << ',' << csv_number(s.tail_estimate)
            << ',' << csv_number(s.max_deviation) << ',' << (r.value ? "ok" : "failed") << '\n';
      }
  }
}

std::vector<std::filesystem::path> emit(const RunRecord& record, OutputFormat format,
                                        const std::filesystem::path& dir, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (format != OutputFormat::structured)
    files.emplace_back(dir / (stem + ".csv"), render([&](std::ostream& o) { write_tabular(o, record); }));
  if (format != OutputFormat::tabular)
    files.emplace_back(dir / (stem + ".json"), record_to_json(record).dump(2) + "\n");
  files.emplace_back(dir / (stem + ".meta.json"), record_metadata(record).dump(2) + "\n");

  std::vector<std::filesystem::path> written;
  for (const auto& [path, content] : files) {
    write_file(path, content);
    written.push_back(path);
  }
  return written;
}

}  // namespace fksusc
