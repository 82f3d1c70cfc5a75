#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l2hodge {

enum class ErrorCode {
  NonManifoldEdge,
  DanglingFace,
  DegreeOutOfRange,
  BadRadii,
  PrimeTooSmall,
  OpenBoundaryChain,
  DegenerateTriangle,
  AspectBlowup,
  AmbiguousKernel,
  SolverStall,
  RankDeficient,
  OpenCycle,
  BadSplit,
  UnderResolved,
  EmptyComplement,
  TruncationTooTight,
  NonConvergent,
  GridTooCoarse,
  NotClosed,
  TailTooFat,
  UnknownOracle,
  ParseError,
  ValidationError,
  ConfigError,
  IoError,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is the
/// machine-readable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SolverStall : public Error {
 public:
  SolverStall(std::size_t iterations, double residual, const std::string& what)
      : Error(ErrorCode::SolverStall, what + " (iterations=" + std::to_string(iterations) +
                                          ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

class RankDeficient : public Error {
 public:
  RankDeficient(std::size_t rank, const std::string& what)
      : Error(ErrorCode::RankDeficient, what + " (numerical rank " + std::to_string(rank) + ")"),
        rank_(rank) {}

  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " +
                                         std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace l2hodge
