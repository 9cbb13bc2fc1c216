#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abcde {

enum class ErrorCode {
  duplicate_item,
  invalid_weight,
  missing_assignment,
  empty_population,
  key_mismatch,
  not_found,
  empty_slice,
  empty_sample,
  no_diff,
  not_in_population,
  no_judgements,
  unknown_task,
  stale_artifact,
  io,
  parse,
};

std::string_view to_string(ErrorCode code);

// Every failure the engine reports carries one of the codes above; callers
// that only care about the message can catch std::runtime_error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace abcde
