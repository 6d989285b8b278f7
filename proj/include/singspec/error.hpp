#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace singspec {

/// Failure categories shared by every module. Tests and the CLI branch on
/// these rather than on message text.
enum class Errc {
  InvalidArgument,
  NonFiniteSample,
  SingularSystem,
  IllConditioned,
  UnsupportedConstraint,
  HigherOrderPole,
  NotAPole,
  ChartError,
  PoleEvaluation,
  NonRealLame,
  DegenerateLame,
  DegenerateSamples,
  DegenerateParameters,
  UnknownEntry,
  SingularPoint,
  DomainViolation,
  SingularSoliton,
  NoSoliton,
  SchemaError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace singspec
