#include "qim/errors.hpp"

namespace qim {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::config_parse: return "config_parse";
    case ErrorCategory::unknown_experiment: return "unknown_experiment";
    case ErrorCategory::resource: return "resource";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::null_posterior: return "null_posterior";
    case ErrorCategory::regime_violation: return "regime_violation";
    case ErrorCategory::missing_artifact: return "missing_artifact";
    case ErrorCategory::insufficient_samples: return "insufficient_samples";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config_parse: return 2;
    case ErrorCategory::unknown_experiment: return 3;
    case ErrorCategory::resource: return 4;
    case ErrorCategory::missing_artifact: return 5;
    case ErrorCategory::invalid_argument: return 6;
    case ErrorCategory::numerical:
    case ErrorCategory::null_posterior:
    case ErrorCategory::regime_violation:
    case ErrorCategory::insufficient_samples: return 7;
  }
  return 1;
}

void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace qim
