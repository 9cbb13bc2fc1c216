#include "abcde/error.hpp"

namespace abcde {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::duplicate_item: return "DuplicateItem";
    case ErrorCode::invalid_weight: return "InvalidWeight";
    case ErrorCode::missing_assignment: return "MissingAssignment";
    case ErrorCode::empty_population: return "EmptyPopulation";
    case ErrorCode::key_mismatch: return "KeyMismatch";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::empty_slice: return "EmptySlice";
    case ErrorCode::empty_sample: return "EmptySample";
    case ErrorCode::no_diff: return "NoDiff";
    case ErrorCode::not_in_population: return "NotInPopulation";
    case ErrorCode::no_judgements: return "NoJudgements";
    case ErrorCode::unknown_task: return "UnknownTask";
    case ErrorCode::stale_artifact: return "StaleArtifact";
    case ErrorCode::io: return "IoError";
    case ErrorCode::parse: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace abcde
