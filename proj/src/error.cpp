#include "rbec/error.hpp"

namespace rbec {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::singular_matrix: return "singular-matrix";
    case Errc::invalid_spec: return "invalid-spec";
    case Errc::unequal_block_lengths: return "unequal-block-lengths";
    case Errc::empty_data: return "empty-data";
    case Errc::insufficient_blocks: return "insufficient-blocks";
    case Errc::decode_failure: return "decode-failure";
    case Errc::incomplete_codeword: return "incomplete-codeword";
    case Errc::directory_not_empty: return "directory-not-empty";
    case Errc::io_error: return "io-error";
    case Errc::corrupt_metadata: return "corrupt-metadata";
    case Errc::object_too_large: return "object-too-large";
    case Errc::no_object: return "no-object";
    case Errc::unknown_disk: return "unknown-disk";
    case Errc::refused: return "refused";
    case Errc::unrecoverable: return "unrecoverable";
    case Errc::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace rbec
