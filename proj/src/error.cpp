#include "coresel/error.hpp"

namespace coresel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::QueryNotInSubset: return "QueryNotInSubset";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::BudgetExceedsItems: return "BudgetExceedsItems";
    case ErrorCode::DegenerateDistance: return "DegenerateDistance";
    case ErrorCode::SimplexViolation: return "SimplexViolation";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::DegenerateDataset: return "DegenerateDataset";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::ZeroVectorRow: return "ZeroVectorRow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace coresel
