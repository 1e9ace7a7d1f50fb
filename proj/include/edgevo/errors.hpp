#pragma once

#include <stdexcept>
#include <string>

namespace edgevo {

enum class ErrorCode {
  // dataset / io
  EmptyInput,
  DecodeError,
  DimensionMismatch,
  ParseError,
  NonMonotonicTimestamps,
  // edge detection
  BadThresholds,
  NoEdgePixels,
  OutOfBounds,
  // corners
  ImageTooSmall,
  // geometry
  NearPiRotation,
  BehindCamera,
  InvalidDepth,
  TooManyLevels,
  // tracker
  TooFewPoints,
  NoValidPoints,
  EmptyResiduals,
  SingularNormalEquations,
  Diverged,
  TrackingLost,
  // evaluation
  NoMatches,
  DegenerateGeometry,
  InsufficientSpan,
  SceneNotVisible,
  // cli
  ConfigError,
  DatasetError,
  IndexOutOfRange,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edgevo
