#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qim {

/// Machine-readable failure classes. The CLI maps each one to an exit code.
enum class ErrorCategory {
  invalid_argument,
  config_parse,
  unknown_experiment,
  resource,
  numerical,
  null_posterior,
  regime_violation,
  missing_artifact,
  insufficient_samples,
};

std::string_view to_string(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] void fail(ErrorCategory category, const std::string& message);

inline void require(bool condition, const char* message, ErrorCategory category = ErrorCategory::invalid_argument) {
  if (!condition) fail(category, message);
}

inline void require(bool condition, const std::string& message,
                    ErrorCategory category = ErrorCategory::invalid_argument) {
  if (!condition) fail(category, message);
}

}  // namespace qim
