#include "gpo/errors.hpp"

namespace gpo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CardinalityExceeded: return "CardinalityExceeded";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EncodingMismatch: return "EncodingMismatch";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::BadInstance: return "BadInstance";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::MeanOutOfRange: return "MeanOutOfRange";
    case ErrorCode::UnsupportedPoint: return "UnsupportedPoint";
    case ErrorCode::BadModel: return "BadModel";
    case ErrorCode::CostBoundExceeded: return "CostBoundExceeded";
    case ErrorCode::ScheduleEmpty: return "ScheduleEmpty";
    case ErrorCode::EmptyKeepSet: return "EmptyKeepSet";
    case ErrorCode::InfeasibleDraw: return "InfeasibleDraw";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::VarianceTooSmall: return "VarianceTooSmall";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace gpo
