#pragma once

#include <stdexcept>
#include <string>

namespace pascm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

/// Requested target lies outside the reachable range of a solver.
struct InfeasibleTarget : Error {
  using Error::Error;
};

struct UnsupportedRate : Error {
  using Error::Error;
};

struct MalformedFile : Error {
  using Error::Error;
};

struct RankError : Error {
  int deficiency;
  RankError(const std::string& msg, int d) : Error(msg), deficiency(d) {}
};

struct CompositionMismatch : Error {
  using Error::Error;
};

struct NotInCodebook : Error {
  using Error::Error;
};

}  // namespace pascm
