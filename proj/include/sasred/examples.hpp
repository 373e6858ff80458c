#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sasred/action.hpp"
#include "sasred/levelset.hpp"
#include "sasred/report.hpp"

namespace sasred::examples {

// A named weight configuration, plus the two-block structure (positive /
// negative weight slots and the block norms forced by the balance equations)
// when the single weight row takes exactly two values of opposite sign.
struct ExampleSpec {
  std::string name;
  std::vector<std::pair<std::string, int>> params;
  Eigen::MatrixXi weights;
  bool has_blocks = false;
  std::vector<int> block_pos, block_neg;  // complex slot indices
  double radius_pos = 0.0, radius_neg = 0.0;
};

ExampleSpec ex41();                            // weights (-1, -1, 1, 1)
ExampleSpec ex42(int k);                       // weights (-k, 1, 1, 1), k >= 1
ExampleSpec ex43(int a, int b, int k, int n);  // a on k+1 slots, -b on the rest
ExampleSpec custom(const Eigen::MatrixXi& weights);

// Norm of the restriction of z to the given complex slots.
double block_norm(const Eigen::VectorXd& z, const std::vector<int>& slots);

// max over samples of | blockwise norm - expected radius |.
double radii_residual(const ExampleSpec& spec, const std::vector<levelset::LevelPoint>& pts,
                      std::vector<double>* per_point = nullptr);

// max off-block entry of the induced metric in a block-adapted tangent
// frame, folded together with the frame's tangency residuals.
double product_block_residual(const ExampleSpec& spec,
                              const std::vector<levelset::LevelPoint>& pts,
                              std::vector<double>* per_point = nullptr);

// Fill the identifying RunConfig fields from a spec (weights, name, params).
void apply_to_config(const ExampleSpec& spec, report::RunConfig& cfg);

// Resolve a spec from a RunConfig produced by apply_to_config or the CLI.
ExampleSpec spec_from_config(const report::RunConfig& cfg);

// Run every enabled check and assemble the report; the JSON and CSV files
// are written when the config carries their paths.
report::VerificationReport run(const report::RunConfig& cfg);

}  // namespace sasred::examples
