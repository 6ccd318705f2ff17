#pragma once

// The (n, k) random binary systematic code: generator [I_k ; R], parity-check
// [R^T ; I_(n-k)], XOR-only encode, erasure decode and syndrome scrub.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rbec/bitmatrix.hpp"

namespace rbec {

using Block = std::vector<std::uint8_t>;

/// Everything needed to regenerate a generator matrix bit-for-bit.
///
/// Entry R(i, j) is derived from (seed, parity_row_ids[i], data_col_ids[j]), so
/// retiring or appending identifiers never changes the surviving entries.
struct CodeSpec {
  static constexpr std::uint32_t kVersion = 1;

  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> data_col_ids;
  std::vector<std::uint64_t> parity_row_ids;
  std::uint32_t version = kVersion;

  // Column ids 0..k-1 and parity row ids 0..n-k-1.
  static CodeSpec fresh(std::size_t n, std::size_t k, std::uint64_t seed);

  std::size_t parity_count() const noexcept { return n - k; }
  // Throws invalid_spec unless n > k >= 1, id lists match n and k, and ids are
  // unique within each list.
  void validate() const;

  friend bool operator==(const CodeSpec&, const CodeSpec&) = default;
};

/// Counts work done on block bytes. Encode and decode touch bytes only through
/// XOR and copy; both are recorded here when a counter is supplied.
struct OpCounter {
  std::uint64_t block_xors = 0;
  std::uint64_t xor_words = 0;  // 8-byte words, a partial tail word counts as one
  std::uint64_t copied_bytes = 0;
  std::uint64_t elimination_row_xors = 0;
  std::uint64_t elimination_bit_ops = 0;
};

void xor_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, OpCounter* counter = nullptr);

struct Codeword {
  std::size_t block_size = 0;
  std::vector<Block> blocks;   // 0..k-1 data, k..n-1 parity
  std::vector<bool> present;

  std::size_t size() const noexcept { return blocks.size(); }
  std::size_t present_count() const noexcept;
  // Marks block i unavailable and drops its bytes.
  void erase(std::size_t i);
};

gf2::BitMatrix build_parity_part(const CodeSpec& spec);  // R, (n-k) x k
gf2::BitMatrix build_generator(const CodeSpec& spec);    // n x k
gf2::BitMatrix build_parity_check(const CodeSpec& spec); // n x (n-k)

// Parity block i is the XOR of every data block j with R(i, j) = 1.
std::vector<Block> encode_parity(const CodeSpec& spec, std::span<const Block> data,
                                 OpCounter* counter = nullptr);
Codeword encode(const CodeSpec& spec, std::span<const Block> data, OpCounter* counter = nullptr);

// Recovers the k data blocks from every present block. Throws
// insufficient_blocks when fewer than k are present and decode_failure when the
// present rows of G do not have rank k.
std::vector<Block> decode(const CodeSpec& spec, const Codeword& word, OpCounter* counter = nullptr);

struct ScrubReport {
  bool consistent = true;
  std::vector<std::size_t> fired;  // parity row indices with a nonzero syndrome
};

ScrubReport scrub(const CodeSpec& spec, const Codeword& word, OpCounter* counter = nullptr);

struct CodeMetrics {
  std::size_t fault_tolerance_estimate = 0;  // max(0, n - k - 10)
  double storage_efficiency = 0.0;           // k / n
  std::size_t ones_in_r = 0;
  // Probability that a uniform random (k + margin) x k matrix has full column
  // rank, margin = n - k - fault_tolerance_estimate.
  double survival_probability = 0.0;
};

CodeMetrics metrics(const CodeSpec& spec);

}  // namespace rbec
