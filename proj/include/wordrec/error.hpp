#pragma once

#include <stdexcept>
#include <string>

namespace wordrec {

enum class Errc {
  // file / container
  missing_file,
  malformed_header,
  unsupported_channels,
  unsupported_encoding,
  io_failure,
  schema_mismatch,
  shape_mismatch,
  // signal content
  empty_signal,
  silent_signal,
  upsampling_requested,
  empty_voiced,
  utterance_too_short,
  // feature extraction
  negative_frequency,
  frame_too_long,
  too_many_filters,
  dimension_mismatch,
  too_few_points,
  // corpus / configuration
  missing_root,
  empty_corpus,
  class_too_small,
  invalid_fraction,
  invalid_config,
  empty_training_set,
  partial_failure,
  numeric_failure,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace wordrec
