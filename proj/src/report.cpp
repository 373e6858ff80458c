#include "sasred/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sasred/errors.hpp"

namespace sasred::report {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (samples < 1) throw Error(ErrorKind::Config, "samples must be at least 1", samples);
  if (charts < 1) throw Error(ErrorKind::Config, "charts must be at least 1", charts);
  if (chart_points < 1)
    throw Error(ErrorKind::Config, "chart_points must be at least 1", chart_points);
  if (weights.cols() < 2)
    throw Error(ErrorKind::Config, "need at least two complex slots", double(weights.cols()));
  if (weights.rows() < 1)
    throw Error(ErrorKind::Config, "need at least one weight row", double(weights.rows()));
  if (!(chart_radius > 0.0))
    throw Error(ErrorKind::Config, "chart_radius must be positive", chart_radius);
}

bool check_enabled(const RunConfig& cfg, const std::string& name) {
  if (cfg.checks.empty()) return true;
  return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
}

double tolerance_for(const RunConfig& cfg, const std::string& name, double fallback) {
  const auto it = cfg.tolerances.find(name);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

bool VerificationReport::verdict() const {
  for (const CheckRecord& c : checks)
    if (!c.skipped && !c.pass) return false;
  return true;
}

nlohmann::ordered_json VerificationReport::to_json(bool include_timestamp) const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  if (include_timestamp) j["generated_at"] = utc_timestamp();

  nlohmann::ordered_json cfg;
  cfg["example"] = config.example;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.params) params[k] = v;
  cfg["params"] = params;
  std::vector<std::vector<int>> w(config.weights.rows());
  for (int i = 0; i < config.weights.rows(); ++i)
    for (int jj = 0; jj < config.weights.cols(); ++jj) w[i].push_back(config.weights(i, jj));
  cfg["weights"] = w;
  cfg["n"] = int(config.weights.cols());
  cfg["samples"] = config.samples;
  cfg["charts"] = config.charts;
  cfg["chart_points"] = config.chart_points;
  cfg["seed"] = config.seed;
  cfg["chart_radius"] = config.chart_radius;
  cfg["checks"] = config.checks;
  nlohmann::ordered_json tols = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.tolerances) tols[k] = v;
  cfg["tolerances"] = tols;
  j["config"] = cfg;

  nlohmann::ordered_json env;
  env["seed"] = config.seed;
  env["stencils"] = {{"first", {{"step", 1e-3}, {"richardson_levels", 2}}},
                     {"second", {{"step", 5e-3}, {"richardson_levels", 2}}}};
  j["environment"] = env;

  nlohmann::ordered_json recs = nlohmann::ordered_json::array();
  for (const CheckRecord& c : checks) {
    nlohmann::ordered_json r;
    r["name"] = c.name;
    r["residual"] = c.residual;
    r["tolerance"] = c.tolerance;
    r["pass"] = c.pass;
    r["skipped"] = c.skipped;
    r["note"] = c.note;
    recs.push_back(r);
  }
  j["checks"] = recs;
  j["measured"] = measured;
  j["verdict"] = verdict() ? "pass" : "fail";
  return j;
}

std::string VerificationReport::to_csv() const {
  std::ostringstream out;
  out << "check,index,value\n";
  out.precision(17);
  for (const PointRecord& p : points)
    out << csv_escape(p.check) << ',' << p.index << ',' << p.value << '\n';
  return out.str();
}

void write_report(const VerificationReport& rep, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot open report path " + path);
  f << rep.to_json().dump(2) << '\n';
}

void write_csv(const VerificationReport& rep, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot open csv path " + path);
  f << rep.to_csv();
}

}  // namespace sasred::report
