#pragma once

#include <stdexcept>
#include <string>

namespace fibercoh {

enum class ErrorKind {
  insufficient_data,
  wrong_depth,
  non_generic_weight,
  inconsistent_sequence,
  invalid_rank,
  invariants_exceed_ambient,
  perversity_range,
  not_complementary,
  projection_undefined,
  critical_weight,
  not_boundary_stratum,
  unknown_case_study,
  weight_zero_unsupported,
  injectivity_unknown,
  injectivity_fails,
  invalid_input,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::wrong_depth: return "wrong depth";
    case ErrorKind::non_generic_weight: return "non-generic weight";
    case ErrorKind::inconsistent_sequence: return "inconsistent sequence";
    case ErrorKind::invalid_rank: return "invalid rank";
    case ErrorKind::invariants_exceed_ambient: return "invariants exceed ambient";
    case ErrorKind::perversity_range: return "perversity range";
    case ErrorKind::not_complementary: return "not complementary";
    case ErrorKind::projection_undefined: return "projection undefined";
    case ErrorKind::critical_weight: return "critical weight";
    case ErrorKind::not_boundary_stratum: return "not a boundary stratum";
    case ErrorKind::unknown_case_study: return "unknown case study";
    case ErrorKind::weight_zero_unsupported: return "weight zero unsupported for b-model";
    case ErrorKind::injectivity_unknown: return "injectivity unknown";
    case ErrorKind::injectivity_fails: return "injectivity fails";
    case ErrorKind::invalid_input: return "invalid input";
  }
  return "error";
}

/// Failure raised by any operation; `kind()` is stable, `what()` adds detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + (detail.empty() ? "" : ": " + detail)),
        kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fibercoh
