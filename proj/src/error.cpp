#include "tightmean/error.hpp"

namespace tightmean {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::NoImprovedSlack: return "NoImprovedSlack";
    case ErrorCode::NetTooLarge: return "NetTooLarge";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace tightmean
