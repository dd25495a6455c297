#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace drumlab {

enum class ErrorCode {
  InvalidMesh,
  MetricValidation,
  DimensionMismatch,
  Numeric,
  CorruptTable,
  DegenerateField,
  Inconsistency,
  Connectivity,
  TruncationTooDeep,
  RecoveryFailure,
  UnreliableProbe,
  BoundTooLarge,
  OutOfRange,
  SearchInfeasible,
  ResolutionTooCoarse,
  NonSimpleSpectrum,
  Usage,
  Io,
};

std::string_view error_code_name(ErrorCode code);

// Validation errors map to CLI exit code 2, everything else to 3.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(ErrorCode code, std::string stage, const std::string& message)
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCode code_;
  std::string stage_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) throw Error(code, message);
}

}  // namespace drumlab
