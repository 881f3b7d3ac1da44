#pragma once

#include <stdexcept>
#include <string>

namespace tightmean {

enum class ErrorCode {
  InvalidArgument = 1,
  TooFewSamples,
  EmptyInput,
  EmptyRegion,
  NoImprovedSlack,
  NetTooLarge,
  Infeasible,
  HypothesisViolated,
  InvalidSpec,
  IoError,
  Internal,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the C API maps it onto a status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace tightmean
