#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contourforge {

enum class ErrorCode {
  // raster
  MalformedHeader,
  TruncatedData,
  UnsupportedMagic,
  RaggedRows,
  NonNumericCell,
  FieldDimensionMismatch,
  InvalidArgument,
  // boundary
  DanglingVector,
  // isofield
  ContourGridMismatch,
  IsovalueOutOfRange,
  // cdt
  CrossingConstraints,
  DuplicatePoint,
  // closure
  NoCandidateEdge,
  OpenChain,
  // shapeops
  ZeroArea,
  // fohs
  EmptySurface,
  AllEdgesDropped,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "malformed-header";
    case ErrorCode::TruncatedData: return "truncated-data";
    case ErrorCode::UnsupportedMagic: return "unsupported-magic";
    case ErrorCode::RaggedRows: return "ragged-rows";
    case ErrorCode::NonNumericCell: return "non-numeric-cell";
    case ErrorCode::FieldDimensionMismatch: return "field-dimension-mismatch";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DanglingVector: return "dangling-vector";
    case ErrorCode::ContourGridMismatch: return "contour-grid-mismatch";
    case ErrorCode::IsovalueOutOfRange: return "isovalue-out-of-range";
    case ErrorCode::CrossingConstraints: return "crossing-constraints";
    case ErrorCode::DuplicatePoint: return "duplicate-point";
    case ErrorCode::NoCandidateEdge: return "no-candidate-edge";
    case ErrorCode::OpenChain: return "open-chain";
    case ErrorCode::ZeroArea: return "zero-area";
    case ErrorCode::EmptySurface: return "empty-surface";
    case ErrorCode::AllEdgesDropped: return "all-edges-dropped";
  }
  return "unknown";
}

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace contourforge
