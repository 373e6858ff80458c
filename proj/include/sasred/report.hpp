#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

namespace sasred::report {

// Everything a verification run needs: the resolved weight matrix, sampling
// budget, which checks to run, and tolerance overrides.
struct RunConfig {
  std::string example;                                // "ex41", "ex42", "ex43", or "custom"
  std::vector<std::pair<std::string, int>> params;    // (k), (a, b, k, n), ...
  Eigen::MatrixXi weights;                            // d x n, resolved
  int samples = 100;                                  // level points for pointwise checks
  int charts = 10;
  int chart_points = 20;                              // per chart
  std::uint64_t seed = 42;
  double chart_radius = 5e-2;
  std::vector<std::string> checks;                    // empty = run all
  std::map<std::string, double> tolerances;           // overrides by check name
  std::string out_path;
  std::string csv_path;

  void validate() const;  // throws ErrorKind::Config
};

struct CheckRecord {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;   // not applicable for this configuration
  std::string note;
};

// One row of the optional per-point CSV.
struct PointRecord {
  std::string check;
  int index = 0;
  double value = 0.0;
};

struct VerificationReport {
  RunConfig config;
  std::vector<CheckRecord> checks;
  std::vector<PointRecord> points;
  nlohmann::ordered_json measured = nlohmann::ordered_json::object();

  bool verdict() const;  // AND over non-skipped checks
  nlohmann::ordered_json to_json(bool include_timestamp = true) const;
  std::string to_csv() const;
};

bool check_enabled(const RunConfig& cfg, const std::string& name);
double tolerance_for(const RunConfig& cfg, const std::string& name, double fallback);

void write_report(const VerificationReport& rep, const std::string& path);
void write_csv(const VerificationReport& rep, const std::string& path);

}  // namespace sasred::report
