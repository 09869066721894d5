#pragma once

#include <stdexcept>
#include <string>

namespace dgflow {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Format,
  UnsupportedElement,
  NonConforming,
  MissingBoundaryTag,
  DegenerateGeometry,
  LinearSolveFailed,
  NewtonDiverged,
  InvalidConfig,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dgflow
