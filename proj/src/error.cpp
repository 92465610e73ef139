#include "poa/error.hpp"

namespace poa {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::InvalidEndpoint: return "InvalidEndpoint";
    case ErrorCode::NoFeasiblePath: return "NoFeasiblePath";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::DegenerateSurface: return "DegenerateSurface";
    case ErrorCode::NoNeighbour: return "NoNeighbour";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace poa
