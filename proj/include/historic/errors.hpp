#pragma once

#include <stdexcept>
#include <string>

namespace historic {

enum class ErrorCode {
  DOMAIN_EMPTY,
  BAD_WINDOW,
  BAD_INTERVAL,
  OUT_OF_BOX,
  BIN_MISMATCH,
  DEGENERATE_TARGET,
  BAD_CYLINDER,
  NOT_MIXING,
  BAD_SEGMENT,
  BAD_CYCLE,
  NO_CYCLES,
  EMPTY_TRUNCATION,
  HYPERBOLIC_FLOAT_HORIZON,
  HORIZON_TOO_SMALL,
  TRACE_MISMATCH,
  UNKNOWN_SCENARIO,
  CONFIG_INVALID,
  PARSE_ERROR,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DOMAIN_EMPTY: return "DOMAIN_EMPTY";
    case ErrorCode::BAD_WINDOW: return "BAD_WINDOW";
    case ErrorCode::BAD_INTERVAL: return "BAD_INTERVAL";
    case ErrorCode::OUT_OF_BOX: return "OUT_OF_BOX";
    case ErrorCode::BIN_MISMATCH: return "BIN_MISMATCH";
    case ErrorCode::DEGENERATE_TARGET: return "DEGENERATE_TARGET";
    case ErrorCode::BAD_CYLINDER: return "BAD_CYLINDER";
    case ErrorCode::NOT_MIXING: return "NOT_MIXING";
    case ErrorCode::BAD_SEGMENT: return "BAD_SEGMENT";
    case ErrorCode::BAD_CYCLE: return "BAD_CYCLE";
    case ErrorCode::NO_CYCLES: return "NO_CYCLES";
    case ErrorCode::EMPTY_TRUNCATION: return "EMPTY_TRUNCATION";
    case ErrorCode::HYPERBOLIC_FLOAT_HORIZON: return "HYPERBOLIC_FLOAT_HORIZON";
    case ErrorCode::HORIZON_TOO_SMALL: return "HORIZON_TOO_SMALL";
    case ErrorCode::TRACE_MISMATCH: return "TRACE_MISMATCH";
    case ErrorCode::UNKNOWN_SCENARIO: return "UNKNOWN_SCENARIO";
    case ErrorCode::CONFIG_INVALID: return "CONFIG_INVALID";
    case ErrorCode::PARSE_ERROR: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

// All library failures carry a stable code plus a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace historic
