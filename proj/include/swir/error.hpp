#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace swir {

enum class Errc {
  NonFinite,
  TooShort,
  InvalidDistribution,
  DimensionMismatch,
  StepOutOfRange,
  AlreadyTerminated,
  EmptySupport,
  BackendFailure,
  BudgetConfigInvalid,
  VersionMismatch,
  CorruptLine,
  ZeroTokens,
  NoOverlap,
  KTooLarge,
  NoAnchor,
  InvalidArgument,
  Protocol,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised by trace/curve readers; carries the 1-based line that failed.
class LineError : public Error {
 public:
  LineError(Errc code, std::size_t line, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace swir
