#pragma once

// Dense bit-packed linear algebra over GF(2).
//
// Storage is row-major. Column j of a row lives in word j / 64 at bit j % 64
// (least significant bit first). Bits past `cols` in the last word of a row are
// always zero; every constructor enforces that.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbec/error.hpp"

namespace rbec::gf2 {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) noexcept {
  return (bits + kWordBits - 1) / kWordBits;
}

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t len) : len_(len), words_(words_for(len), 0) {}

  static BitVector from_bits(std::initializer_list<int> bits);
  static BitVector from_bits(std::span<const std::uint8_t> bits);
  // Throws invalid_argument if any padding bit is set.
  static BitVector from_words(std::size_t len, std::vector<Word> words);

  std::size_t size() const noexcept { return len_; }
  bool get(std::size_t i) const;
  std::span<const Word> words() const noexcept { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t len_ = 0;
  std::vector<Word> words_;
};

class BitMatrix {
 public:
  BitMatrix() = default;
  // All-zero rows x cols matrix. Zero-sized dimensions are permitted here so
  // that selections may return empty matrices.
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(words_for(cols)), bits_(rows * stride_, 0) {}

  template <class EntryFn>
  static BitMatrix generate(std::size_t rows, std::size_t cols, EntryFn&& entry) {
    BitMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      Word* row = m.bits_.data() + i * m.stride_;
      for (std::size_t w = 0; w < m.stride_; ++w) {
        const std::size_t end = std::min(cols, (w + 1) * kWordBits);
        Word acc = 0;
        for (std::size_t j = w * kWordBits; j < end; ++j) {
          acc |= static_cast<Word>(static_cast<bool>(entry(i, j))) << (j % kWordBits);
        }
        row[w] = acc;
      }
    }
    return m;
  }

  static BitMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);
  // `words` holds rows * words_for(cols) words; throws invalid_argument on a
  // size mismatch or a set padding bit.
  static BitMatrix from_words(std::size_t rows, std::size_t cols, std::vector<Word> words);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t words_per_row() const noexcept { return stride_; }

  bool get(std::size_t i, std::size_t j) const;
  std::span<const Word> row(std::size_t i) const;
  std::span<const Word> storage() const noexcept { return bits_; }

  bool is_zero() const noexcept;
  std::size_t count_ones() const noexcept;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> bits_;
};

BitMatrix identity(std::size_t n);
BitMatrix multiply(const BitMatrix& a, const BitMatrix& b);
BitVector multiply(const BitMatrix& a, const BitVector& x);
BitMatrix transpose(const BitMatrix& m);
std::size_t rank(const BitMatrix& m);

BitMatrix vstack(const BitMatrix& top, const BitMatrix& bottom);
// Indices must be in range and strictly increasing.
BitMatrix select_rows(const BitMatrix& m, std::span<const std::size_t> rows);
BitMatrix select_cols(const BitMatrix& m, std::span<const std::size_t> cols);

/// One elementary step of an elimination: row `target` ^= row `source`.
/// Rows are named by their index in the original matrix, so row swaps never
/// appear as data movement.
struct RowXor {
  std::uint32_t target;
  std::uint32_t source;
  friend bool operator==(const RowXor&, const RowXor&) = default;
};

struct EliminationStats {
  std::uint64_t row_xors = 0;
  // Bit-level work: each row XOR is charged the full row width in bits.
  std::uint64_t bit_ops = 0;
};

/// Replayable record of a Gauss-Jordan reduction of a full-column-rank matrix.
///
/// Applying `ops` in order to any per-row payload that satisfies A * X = payload
/// leaves the value of unknown j in the payload of original row `pivot_rows[j]`.
/// Pivot choice: for column j the first row at or below position j holding a 1.
class Transcript {
 public:
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return pivot_rows_.size(); }
  std::span<const RowXor> ops() const noexcept { return ops_; }
  std::span<const std::uint32_t> pivot_rows() const noexcept { return pivot_rows_; }
  const EliminationStats& stats() const noexcept { return stats_; }

  // Drops every step that cannot influence the unknowns listed in `wanted`.
  // Statistics describe the original bit-level elimination and are kept.
  Transcript pruned(std::span<const std::size_t> wanted) const;

  template <class Payload, class XorFn>
  void replay(std::span<Payload> payload, XorFn&& xor_into) const {
    if (payload.size() != rows_) {
      throw Error(Errc::dimension_mismatch, "transcript replay needs one payload per row");
    }
    for (const RowXor& op : ops_) xor_into(payload[op.target], payload[op.source]);
  }

 private:
  friend Transcript eliminate(const BitMatrix& a);

  std::size_t rows_ = 0;
  std::vector<RowXor> ops_;
  std::vector<std::uint32_t> pivot_rows_;
  EliminationStats stats_;
};

// Requires a.rows() >= a.cols(); throws singular_matrix when rank(a) < a.cols().
Transcript eliminate(const BitMatrix& a);
// Unique x with a * x = rhs; same errors as eliminate.
BitVector solve(const BitMatrix& a, const BitVector& rhs);

// Hex form: each row is ceil(cols / 8) bytes, column 8b + t stored in byte b at
// mask 0x80 >> t, rows concatenated, lowercase, no separators.
std::string to_hex(const BitMatrix& m);
BitMatrix from_hex(std::size_t rows, std::size_t cols, std::string_view hex);

}  // namespace rbec::gf2
