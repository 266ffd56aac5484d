#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ojs {

enum class ErrorCode {
  InvalidInput,
  InvalidConfig,
  EmptyTransmitSet,
  UnknownMcs,
  StateSpaceTooLarge,
  NotBipartite,
  DegreeExceedsS,
  NotSeriesParallel,
  TooManyBs,
  GraphTooLarge,
  ColoringExceedsS,
  SearchSpaceTooLarge,
  TraceTooShort,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported through this type; the
/// code lets callers branch (e.g. fall back to greedy on StateSpaceTooLarge).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ojs
