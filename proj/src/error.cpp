#include "l2hodge/error.hpp"

namespace l2hodge {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::DanglingFace: return "DanglingFace";
    case ErrorCode::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorCode::BadRadii: return "BadRadii";
    case ErrorCode::PrimeTooSmall: return "PrimeTooSmall";
    case ErrorCode::OpenBoundaryChain: return "OpenBoundaryChain";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::AspectBlowup: return "AspectBlowup";
    case ErrorCode::AmbiguousKernel: return "AmbiguousKernel";
    case ErrorCode::SolverStall: return "SolverStall";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::OpenCycle: return "OpenCycle";
    case ErrorCode::BadSplit: return "BadSplit";
    case ErrorCode::UnderResolved: return "UnderResolved";
    case ErrorCode::EmptyComplement: return "EmptyComplement";
    case ErrorCode::TruncationTooTight: return "TruncationTooTight";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::TailTooFat: return "TailTooFat";
    case ErrorCode::UnknownOracle: return "UnknownOracle";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace l2hodge
