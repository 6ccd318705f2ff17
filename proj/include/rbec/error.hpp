#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbec {

enum class Errc {
  invalid_dimension,
  dimension_mismatch,
  index_out_of_range,
  singular_matrix,
  invalid_spec,
  unequal_block_lengths,
  empty_data,
  insufficient_blocks,
  decode_failure,
  incomplete_codeword,
  directory_not_empty,
  io_error,
  corrupt_metadata,
  object_too_large,
  no_object,
  unknown_disk,
  refused,
  unrecoverable,
  invalid_argument,
};

std::string_view errc_name(Errc code) noexcept;

// All library failures are reported through this type; `code()` is stable and
// is what the CLI maps onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rbec
