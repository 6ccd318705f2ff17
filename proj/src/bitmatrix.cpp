#include "rbec/bitmatrix.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <utility>

namespace rbec::gf2 {

namespace {

Word tail_mask(std::size_t cols) {
  const std::size_t used = cols % kWordBits;
  return used == 0 ? ~Word{0} : (Word{1} << used) - 1;
}

bool padding_clear(std::span<const Word> row, std::size_t cols) {
  if (row.empty()) return true;
  return (row.back() & ~tail_mask(cols)) == 0;
}

bool test_bit(const Word* row, std::size_t j) {
  return (row[j / kWordBits] >> (j % kWordBits)) & 1U;
}

void set_bit(Word* row, std::size_t j) { row[j / kWordBits] |= Word{1} << (j % kWordBits); }

void xor_row(Word* dst, const Word* src, std::size_t stride) {
  for (std::size_t w = 0; w < stride; ++w) dst[w] ^= src[w];
}

void check_increasing(std::span<const std::size_t> idx, std::size_t bound) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= bound) throw Error(Errc::index_out_of_range, "selection index out of range");
    if (i > 0 && idx[i] <= idx[i - 1]) {
      throw Error(Errc::index_out_of_range, "selection indices must be strictly increasing");
    }
  }
}

}  // namespace

BitVector BitVector::from_bits(std::initializer_list<int> bits) {
  BitVector v(bits.size());
  std::size_t i = 0;
  for (int b : bits) {
    if (b & 1) set_bit(v.words_.data(), i);
    ++i;
  }
  return v;
}

BitVector BitVector::from_bits(std::span<const std::uint8_t> bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1U) set_bit(v.words_.data(), i);
  }
  return v;
}

BitVector BitVector::from_words(std::size_t len, std::vector<Word> words) {
  if (words.size() != words_for(len) || !padding_clear(words, len)) {
    throw Error(Errc::invalid_argument, "bit vector words do not match length");
  }
  BitVector v;
  v.len_ = len;
  v.words_ = std::move(words);
  return v;
}

bool BitVector::get(std::size_t i) const {
  if (i >= len_) throw Error(Errc::index_out_of_range, "bit vector index");
  return test_bit(words_.data(), i);
}

BitMatrix BitMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  const std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
  BitMatrix m(rows.size(), cols);
  std::size_t i = 0;
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(Errc::dimension_mismatch, "ragged row list");
    std::size_t j = 0;
    for (int b : r) {
      if (b & 1) set_bit(m.bits_.data() + i * m.stride_, j);
      ++j;
    }
    ++i;
  }
  return m;
}

BitMatrix BitMatrix::from_words(std::size_t rows, std::size_t cols, std::vector<Word> words) {
  BitMatrix m(rows, cols);
  if (words.size() != m.bits_.size()) {
    throw Error(Errc::invalid_argument, "word count does not match matrix shape");
  }
  m.bits_ = std::move(words);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!padding_clear(m.row(i), cols)) {
      throw Error(Errc::invalid_argument, "padding bits set in row " + std::to_string(i));
    }
  }
  return m;
}

bool BitMatrix::get(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw Error(Errc::index_out_of_range, "matrix entry");
  return test_bit(bits_.data() + i * stride_, j);
}

std::span<const Word> BitMatrix::row(std::size_t i) const {
  if (i >= rows_) throw Error(Errc::index_out_of_range, "matrix row");
  return std::span<const Word>(bits_).subspan(i * stride_, stride_);
}

bool BitMatrix::is_zero() const noexcept {
  return std::all_of(bits_.begin(), bits_.end(), [](Word w) { return w == 0; });
}

std::size_t BitMatrix::count_ones() const noexcept {
  std::size_t n = 0;
  for (Word w : bits_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitMatrix identity(std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_dimension, "identity order must be at least 1");
  return BitMatrix::generate(n, n, [](std::size_t i, std::size_t j) { return i == j; });
}

BitMatrix multiply(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(Errc::dimension_mismatch, "multiply: a.cols != b.rows");
  }
  const std::size_t stride = b.words_per_row();
  std::vector<Word> out(a.rows() * stride, 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Word* dst = out.data() + i * stride;
    auto arow = a.row(i);
    for (std::size_t w = 0; w < arow.size(); ++w) {
      Word bits = arow[w];
      while (bits != 0) {
        const std::size_t l = w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits));
        bits &= bits - 1;
        xor_row(dst, b.row(l).data(), stride);
      }
    }
  }
  return BitMatrix::from_words(a.rows(), b.cols(), std::move(out));
}

BitVector multiply(const BitMatrix& a, const BitVector& x) {
  if (a.cols() != x.size()) throw Error(Errc::dimension_mismatch, "multiply: a.cols != len(x)");
  std::vector<Word> out(words_for(a.rows()), 0);
  auto xw = x.words();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    Word acc = 0;
    for (std::size_t w = 0; w < arow.size(); ++w) acc ^= arow[w] & xw[w];
    if (std::popcount(acc) & 1) set_bit(out.data(), i);
  }
  return BitVector::from_words(a.rows(), std::move(out));
}

BitMatrix transpose(const BitMatrix& m) {
  return BitMatrix::generate(m.cols(), m.rows(),
                             [&](std::size_t i, std::size_t j) { return m.get(j, i); });
}

std::size_t rank(const BitMatrix& m) {
  const std::size_t stride = m.words_per_row();
  std::vector<Word> work(m.storage().begin(), m.storage().end());
  std::size_t pivot = 0;
  for (std::size_t j = 0; j < m.cols() && pivot < m.rows(); ++j) {
    std::size_t p = pivot;
    while (p < m.rows() && !test_bit(work.data() + p * stride, j)) ++p;
    if (p == m.rows()) continue;
    if (p != pivot) {
      std::swap_ranges(work.begin() + static_cast<std::ptrdiff_t>(p * stride),
                       work.begin() + static_cast<std::ptrdiff_t>((p + 1) * stride),
                       work.begin() + static_cast<std::ptrdiff_t>(pivot * stride));
    }
    const Word* prow = work.data() + pivot * stride;
    for (std::size_t r = pivot + 1; r < m.rows(); ++r) {
      Word* row = work.data() + r * stride;
      if (test_bit(row, j)) xor_row(row, prow, stride);
    }
    ++pivot;
  }
  return pivot;
}

BitMatrix vstack(const BitMatrix& top, const BitMatrix& bottom) {
  if (top.cols() != bottom.cols()) throw Error(Errc::dimension_mismatch, "vstack: column counts differ");
  std::vector<Word> words(top.storage().begin(), top.storage().end());
  words.insert(words.end(), bottom.storage().begin(), bottom.storage().end());
  return BitMatrix::from_words(top.rows() + bottom.rows(), top.cols(), std::move(words));
}

BitMatrix select_rows(const BitMatrix& m, std::span<const std::size_t> rows) {
  check_increasing(rows, m.rows());
  std::vector<Word> words;
  words.reserve(rows.size() * m.words_per_row());
  for (std::size_t r : rows) {
    auto src = m.row(r);
    words.insert(words.end(), src.begin(), src.end());
  }
  return BitMatrix::from_words(rows.size(), m.cols(), std::move(words));
}

BitMatrix select_cols(const BitMatrix& m, std::span<const std::size_t> cols) {
  check_increasing(cols, m.cols());
  return BitMatrix::generate(m.rows(), cols.size(),
                             [&](std::size_t i, std::size_t j) { return m.get(i, cols[j]); });
}

Transcript Transcript::pruned(std::span<const std::size_t> wanted) const {
  std::vector<bool> live(rows_, false);
  for (std::size_t j : wanted) {
    if (j >= pivot_rows_.size()) throw Error(Errc::index_out_of_range, "pruned: unknown index");
    live[pivot_rows_[j]] = true;
  }
  std::vector<RowXor> kept;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    if (!live[it->target]) continue;
    live[it->source] = true;
    kept.push_back(*it);
  }
  std::reverse(kept.begin(), kept.end());

  Transcript out = *this;
  out.ops_ = std::move(kept);
  return out;
}

Transcript eliminate(const BitMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw Error(Errc::dimension_mismatch, "eliminate: fewer rows than columns");

  const std::size_t stride = a.words_per_row();
  std::vector<Word> work(a.storage().begin(), a.storage().end());
  // position -> original row index
  std::vector<std::uint32_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0U);

  Transcript t;
  t.rows_ = m;
  t.pivot_rows_.resize(n);

  for (std::size_t j = 0; j < n; ++j) {
    std::size_t p = j;
    while (p < m && !test_bit(work.data() + p * stride, j)) ++p;
    if (p == m) {
      throw Error(Errc::singular_matrix,
                  "column " + std::to_string(j) + " has no pivot (rank < " + std::to_string(n) + ")");
    }
    if (p != j) {
      std::swap_ranges(work.begin() + static_cast<std::ptrdiff_t>(p * stride),
                       work.begin() + static_cast<std::ptrdiff_t>((p + 1) * stride),
                       work.begin() + static_cast<std::ptrdiff_t>(j * stride));
      std::swap(perm[p], perm[j]);
    }
    const Word* prow = work.data() + j * stride;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == j) continue;
      Word* row = work.data() + r * stride;
      if (!test_bit(row, j)) continue;
      xor_row(row, prow, stride);
      t.ops_.push_back({perm[r], perm[j]});
      ++t.stats_.row_xors;
      t.stats_.bit_ops += n;
    }
  }
  for (std::size_t j = 0; j < n; ++j) t.pivot_rows_[j] = perm[j];
  return t;
}

BitVector solve(const BitMatrix& a, const BitVector& rhs) {
  if (rhs.size() != a.rows()) throw Error(Errc::dimension_mismatch, "solve: rhs length != a.rows");
  const Transcript t = eliminate(a);
  std::vector<std::uint8_t> bits(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) bits[i] = rhs.get(i) ? 1 : 0;
  t.replay(std::span<std::uint8_t>(bits), [](std::uint8_t& dst, std::uint8_t src) { dst ^= src; });

  std::vector<std::uint8_t> x(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) x[j] = bits[t.pivot_rows()[j]];
  return BitVector::from_bits(std::span<const std::uint8_t>(x));
}

std::string to_hex(const BitMatrix& m) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t row_bytes = (m.cols() + 7) / 8;
  std::string out;
  out.reserve(m.rows() * row_bytes * 2);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t b = 0; b < row_bytes; ++b) {
      unsigned byte = 0;
      for (std::size_t t = 0; t < 8; ++t) {
        const std::size_t j = b * 8 + t;
        if (j < m.cols() && m.get(i, j)) byte |= 0x80U >> t;
      }
      out.push_back(kDigits[byte >> 4]);
      out.push_back(kDigits[byte & 0xF]);
    }
  }
  return out;
}

BitMatrix from_hex(std::size_t rows, std::size_t cols, std::string_view hex) {
  const std::size_t row_bytes = (cols + 7) / 8;
  if (hex.size() != rows * row_bytes * 2) {
    throw Error(Errc::invalid_argument, "hex length does not match matrix shape");
  }
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    throw Error(Errc::invalid_argument, std::string("bad hex digit '") + c + "'");
  };
  BitMatrix probe(rows, cols);
  std::vector<Word> words(rows * probe.words_per_row(), 0);
  for (std::size_t i = 0; i < rows; ++i) {
    Word* row = words.data() + i * probe.words_per_row();
    for (std::size_t b = 0; b < row_bytes; ++b) {
      const std::size_t at = (i * row_bytes + b) * 2;
      const unsigned byte = (nibble(hex[at]) << 4) | nibble(hex[at + 1]);
      for (std::size_t t = 0; t < 8; ++t) {
        if (!(byte & (0x80U >> t))) continue;
        const std::size_t j = b * 8 + t;
        if (j >= cols) throw Error(Errc::invalid_argument, "hex sets a padding bit");
        set_bit(row, j);
      }
    }
  }
  return BitMatrix::from_words(rows, cols, std::move(words));
}

}  // namespace rbec::gf2
