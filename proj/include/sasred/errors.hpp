#pragma once

#include <stdexcept>
#include <string>

namespace sasred {

enum class ErrorKind {
  EvaluationDomain,   // a function was sampled outside its valid domain
  RankDeficiency,     // dependent input where independence is required
  RetractionFailure,  // Newton refinement did not converge
  Regularity,         // a correction or Gram system degenerated
  DegenerateOrbit,    // a fundamental field vanishes at the point
  Infeasible,         // the constraint set is empty
  Precondition,       // caller broke a documented precondition
  Config              // bad run configuration
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double datum = 0.0, int index = -1)
      : std::runtime_error(what), kind_(kind), datum_(datum), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Numerical payload, e.g. the last residual of a failed iteration.
  double datum() const noexcept { return datum_; }
  // Structural payload, e.g. the index of the offending input vector.
  int index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  double datum_;
  int index_;
};

const char* error_kind_name(ErrorKind k);

}  // namespace sasred
