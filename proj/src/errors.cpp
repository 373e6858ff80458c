#include "sasred/errors.hpp"

namespace sasred {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::EvaluationDomain: return "evaluation_domain";
    case ErrorKind::RankDeficiency: return "rank_deficiency";
    case ErrorKind::RetractionFailure: return "retraction_failure";
    case ErrorKind::Regularity: return "regularity";
    case ErrorKind::DegenerateOrbit: return "degenerate_orbit";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace sasred
