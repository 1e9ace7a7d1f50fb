#include "edgevo/errors.hpp"

namespace edgevo {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::BadThresholds: return "BadThresholds";
    case ErrorCode::NoEdgePixels: return "NoEdgePixels";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::NearPiRotation: return "NearPiRotation";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::TooManyLevels: return "TooManyLevels";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NoValidPoints: return "NoValidPoints";
    case ErrorCode::EmptyResiduals: return "EmptyResiduals";
    case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::TrackingLost: return "TrackingLost";
    case ErrorCode::NoMatches: return "NoMatches";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::InsufficientSpan: return "InsufficientSpan";
    case ErrorCode::SceneNotVisible: return "SceneNotVisible";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DatasetError: return "DatasetError";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  }
  return "UnknownError";
}

}  // namespace edgevo
