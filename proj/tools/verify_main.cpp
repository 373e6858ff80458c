#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sasred/errors.hpp"
#include "sasred/examples.hpp"
#include "sasred/report.hpp"

namespace {

using sasred::Error;
using sasred::ErrorKind;

Eigen::MatrixXi parse_weights(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("cannot parse weights: ") + e.what());
  }
  if (!j.is_array() || j.empty())
    throw Error(ErrorKind::Config, "weights must be a nonempty array");
  // Accept a flat row or an array of rows.
  std::vector<std::vector<int>> rows;
  if (j.front().is_array()) {
    for (const auto& r : j) rows.push_back(r.get<std::vector<int>>());
  } else {
    rows.push_back(j.get<std::vector<int>>());
  }
  Eigen::MatrixXi w(int(rows.size()), int(rows.front().size()));
  for (int i = 0; i < w.rows(); ++i) {
    if (int(rows[i].size()) != w.cols())
      throw Error(ErrorKind::Config, "weight rows must share one length", double(rows[i].size()));
    for (int c = 0; c < w.cols(); ++c) w(i, c) = rows[i][c];
  }
  return w;
}

void load_config_file(const std::string& path, sasred::report::RunConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot open config file " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("cannot parse config file: ") + e.what());
  }
  if (j.contains("example")) cfg.example = j["example"].get<std::string>();
  if (j.contains("params"))
    for (const auto& [key, value] : j["params"].items())
      cfg.params.emplace_back(key, value.get<int>());
  if (j.contains("weights")) cfg.weights = parse_weights(j["weights"].dump());
  if (j.contains("samples")) cfg.samples = j["samples"].get<int>();
  if (j.contains("charts")) cfg.charts = j["charts"].get<int>();
  if (j.contains("chart_points")) cfg.chart_points = j["chart_points"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("chart_radius")) cfg.chart_radius = j["chart_radius"].get<double>();
  if (j.contains("checks")) cfg.checks = j["checks"].get<std::vector<std::string>>();
  if (j.contains("tolerances"))
    for (const auto& [key, value] : j["tolerances"].items())
      cfg.tolerances[key] = value.get<double>();
  if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
  if (j.contains("csv")) cfg.csv_path = j["csv"].get<std::string>();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int param_or_throw(const sasred::report::RunConfig& cfg, const std::string& key) {
  for (const auto& [k, v] : cfg.params)
    if (k == key) return v;
  throw Error(ErrorKind::Config, "example requires --" + key);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verify: numerical checks for Sasakian reductions of weighted sphere actions"};

  std::string example, weights_text, config_path, out_path, csv_path, checks_text;
  std::vector<std::string> tol_entries;
  int samples = 0, charts = 0, chart_points = 0, n = 0, k = 0, a = 0, b = 0;
  std::uint64_t seed = 0;
  double chart_radius = 0.0;

  app.add_option("--example", example, "named configuration: ex41, ex42, ex43");
  app.add_option("--weights", weights_text, "weight row as a JSON array, e.g. \"[-2,1,1,1]\"");
  app.add_option("--n", n, "number of complex slots (with --weights or ex43)");
  app.add_option("--k", k, "parameter k (ex42, ex43)");
  app.add_option("--a", a, "parameter a (ex43)");
  app.add_option("--b", b, "parameter b (ex43)");
  app.add_option("--samples", samples, "level-set sample count");
  app.add_option("--charts", charts, "number of quotient charts");
  app.add_option("--chart-points", chart_points, "points per chart");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--chart-radius", chart_radius, "coordinate radius of each chart");
  app.add_option("--checks", checks_text, "comma-separated check names to run");
  app.add_option("--tol", tol_entries, "tolerance override, name=value (repeatable)")
      ->expected(-1);
  app.add_option("--config", config_path, "JSON config file; flags override its entries");
  app.add_option("--out", out_path, "write the JSON report here");
  app.add_option("--csv", csv_path, "write per-point residuals as CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    sasred::report::RunConfig cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);

    if (app.count("--example")) cfg.example = example;
    if (app.count("--weights")) {
      cfg.example = "custom";
      cfg.weights = parse_weights(weights_text);
    }
    auto set_param = [&](const std::string& key, int value) {
      for (auto& [pk, pv] : cfg.params)
        if (pk == key) {
          pv = value;
          return;
        }
      cfg.params.emplace_back(key, value);
    };
    if (app.count("--k")) set_param("k", k);
    if (app.count("--a")) set_param("a", a);
    if (app.count("--b")) set_param("b", b);
    if (app.count("--n")) set_param("n", n);
    if (app.count("--samples")) cfg.samples = samples;
    if (app.count("--charts")) cfg.charts = charts;
    if (app.count("--chart-points")) cfg.chart_points = chart_points;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--chart-radius")) cfg.chart_radius = chart_radius;
    if (app.count("--checks")) cfg.checks = split_commas(checks_text);
    for (const std::string& entry : tol_entries) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorKind::Config, "tolerance override must be name=value: " + entry);
      cfg.tolerances[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    }
    if (app.count("--out")) cfg.out_path = out_path;
    if (app.count("--csv")) cfg.csv_path = csv_path;

    // Resolve named examples into weight matrices up front so validation and
    // the report see the real configuration.
    if (cfg.example == "ex41") {
      sasred::examples::apply_to_config(sasred::examples::ex41(), cfg);
    } else if (cfg.example == "ex42") {
      sasred::examples::apply_to_config(sasred::examples::ex42(param_or_throw(cfg, "k")), cfg);
    } else if (cfg.example == "ex43") {
      sasred::examples::apply_to_config(
          sasred::examples::ex43(param_or_throw(cfg, "a"), param_or_throw(cfg, "b"),
                                 param_or_throw(cfg, "k"), param_or_throw(cfg, "n")),
          cfg);
    } else if (cfg.example == "custom" || cfg.example.empty()) {
      if (cfg.weights.size() == 0)
        throw Error(ErrorKind::Config, "need --example or --weights");
      cfg.example = "custom";
      if (app.count("--n") && n != cfg.weights.cols())
        throw Error(ErrorKind::Config, "--n disagrees with the weight row length", n);
    } else {
      throw Error(ErrorKind::Config, "unknown example " + cfg.example);
    }

    const auto rep = sasred::examples::run(cfg);

    for (const auto& c : rep.checks) {
      std::printf("%-24s %s  residual %.3e  tolerance %.3e%s%s\n", c.name.c_str(),
                  c.skipped ? "skip" : (c.pass ? "pass" : "FAIL"), c.residual, c.tolerance,
                  c.note.empty() ? "" : "  ", c.note.c_str());
    }
    std::printf("verdict: %s\n", rep.verdict() ? "pass" : "fail");
    if (!cfg.out_path.empty()) std::printf("report: %s\n", cfg.out_path.c_str());
    if (!cfg.csv_path.empty()) std::printf("csv: %s\n", cfg.csv_path.c_str());
    return rep.verdict() ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", sasred::error_kind_name(e.kind()), e.what());
    return e.kind() == ErrorKind::Config ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
