#include "drumlab/errors.hpp"

namespace drumlab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMesh: return "invalid-mesh";
    case ErrorCode::MetricValidation: return "metric-validation";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::Numeric: return "numeric";
    case ErrorCode::CorruptTable: return "corrupt-table";
    case ErrorCode::DegenerateField: return "degenerate-field";
    case ErrorCode::Inconsistency: return "inconsistency";
    case ErrorCode::Connectivity: return "connectivity";
    case ErrorCode::TruncationTooDeep: return "truncation-too-deep";
    case ErrorCode::RecoveryFailure: return "recovery-failure";
    case ErrorCode::UnreliableProbe: return "unreliable-probe";
    case ErrorCode::BoundTooLarge: return "bound-too-large";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::SearchInfeasible: return "search-infeasible";
    case ErrorCode::ResolutionTooCoarse: return "resolution-too-coarse";
    case ErrorCode::NonSimpleSpectrum: return "non-simple-spectrum";
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMesh:
    case ErrorCode::MetricValidation:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::CorruptTable:
    case ErrorCode::OutOfRange:
    case ErrorCode::Usage:
    case ErrorCode::Io:
      return true;
    default:
      return false;
  }
}

}  // namespace drumlab
