#include "rbec/code.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include "rbec/randmat.hpp"

namespace rbec {

namespace {

constexpr std::size_t kReliabilityMargin = 10;

std::uint64_t words_of(std::size_t bytes) { return (bytes + 7) / 8; }

std::size_t common_block_size(std::span<const Block> data) {
  if (data.empty()) throw Error(Errc::empty_data, "no data blocks");
  const std::size_t size = data.front().size();
  if (size == 0) throw Error(Errc::empty_data, "data blocks are empty");
  for (const Block& b : data) {
    if (b.size() != size) throw Error(Errc::unequal_block_lengths, "data blocks differ in length");
  }
  return size;
}

void check_word(const CodeSpec& spec, const Codeword& word) {
  if (word.blocks.size() != spec.n || word.present.size() != spec.n) {
    throw Error(Errc::dimension_mismatch, "codeword does not hold n blocks");
  }
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (word.present[i] && word.blocks[i].size() != word.block_size) {
      throw Error(Errc::unequal_block_lengths, "block " + std::to_string(i) + " has wrong size");
    }
  }
}

bool all_zero(const Block& b) {
  return std::all_of(b.begin(), b.end(), [](std::uint8_t v) { return v == 0; });
}

}  // namespace

CodeSpec CodeSpec::fresh(std::size_t n, std::size_t k, std::uint64_t seed) {
  CodeSpec spec;
  spec.n = n;
  spec.k = k;
  spec.seed = seed;
  for (std::size_t j = 0; j < k; ++j) spec.data_col_ids.push_back(j);
  for (std::size_t i = 0; k < n && i < n - k; ++i) spec.parity_row_ids.push_back(i);
  spec.validate();
  return spec;
}

void CodeSpec::validate() const {
  if (k == 0 || n <= k) throw Error(Errc::invalid_spec, "need n > k >= 1");
  if (data_col_ids.size() != k || parity_row_ids.size() != n - k) {
    throw Error(Errc::invalid_spec, "identifier lists do not match n and k");
  }
  if (std::set<std::uint64_t>(data_col_ids.begin(), data_col_ids.end()).size() != k ||
      std::set<std::uint64_t>(parity_row_ids.begin(), parity_row_ids.end()).size() != n - k) {
    throw Error(Errc::invalid_spec, "duplicate identifiers");
  }
  if (version != kVersion) throw Error(Errc::invalid_spec, "unsupported code version");
}

void xor_into(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, OpCounter* counter) {
  if (dst.size() != src.size()) throw Error(Errc::unequal_block_lengths, "xor operands differ in length");
  const std::size_t full = dst.size() / 8 * 8;
  for (std::size_t i = 0; i < full; i += 8) {
    std::uint64_t a;
    std::uint64_t b;
    std::memcpy(&a, dst.data() + i, 8);
    std::memcpy(&b, src.data() + i, 8);
    a ^= b;
    std::memcpy(dst.data() + i, &a, 8);
  }
  for (std::size_t i = full; i < dst.size(); ++i) dst[i] ^= src[i];
  if (counter) {
    ++counter->block_xors;
    counter->xor_words += words_of(dst.size());
  }
}

std::size_t Codeword::present_count() const noexcept {
  return static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
}

void Codeword::erase(std::size_t i) {
  if (i >= blocks.size()) throw Error(Errc::index_out_of_range, "codeword index");
  present[i] = false;
  blocks[i].clear();
}

gf2::BitMatrix build_parity_part(const CodeSpec& spec) {
  spec.validate();
  return randmat::random_matrix({spec.seed, 0.5}, spec.parity_row_ids, spec.data_col_ids);
}

gf2::BitMatrix build_generator(const CodeSpec& spec) {
  return gf2::vstack(gf2::identity(spec.k), build_parity_part(spec));
}

gf2::BitMatrix build_parity_check(const CodeSpec& spec) {
  return gf2::vstack(gf2::transpose(build_parity_part(spec)), gf2::identity(spec.parity_count()));
}

std::vector<Block> encode_parity(const CodeSpec& spec, std::span<const Block> data, OpCounter* counter) {
  spec.validate();
  const std::size_t size = common_block_size(data);
  if (data.size() != spec.k) throw Error(Errc::dimension_mismatch, "encode needs exactly k data blocks");
  const gf2::BitMatrix r = build_parity_part(spec);

  std::vector<Block> parity(spec.parity_count(), Block(size, 0));
  for (std::size_t i = 0; i < parity.size(); ++i) {
    for (std::size_t j = 0; j < spec.k; ++j) {
      if (r.get(i, j)) xor_into(parity[i], data[j], counter);
    }
  }
  return parity;
}

Codeword encode(const CodeSpec& spec, std::span<const Block> data, OpCounter* counter) {
  std::vector<Block> parity = encode_parity(spec, data, counter);
  Codeword word;
  word.block_size = data.front().size();
  word.blocks.assign(data.begin(), data.end());
  if (counter) counter->copied_bytes += spec.k * word.block_size;
  for (Block& p : parity) word.blocks.push_back(std::move(p));
  word.present.assign(spec.n, true);
  return word;
}

std::vector<Block> decode(const CodeSpec& spec, const Codeword& word, OpCounter* counter) {
  spec.validate();
  check_word(spec, word);

  std::vector<std::size_t> rows;
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (word.present[i]) rows.push_back(i);
    else if (i < spec.k) missing.push_back(i);
  }
  if (rows.size() < spec.k) {
    throw Error(Errc::insufficient_blocks, std::to_string(rows.size()) + " of " +
                                               std::to_string(spec.n) + " blocks present, need " +
                                               std::to_string(spec.k));
  }

  std::vector<Block> data(spec.k);
  for (std::size_t j = 0; j < spec.k; ++j) {
    if (word.present[j]) data[j] = word.blocks[j];
  }
  if (counter) counter->copied_bytes += (spec.k - missing.size()) * word.block_size;
  if (missing.empty()) return data;

  const gf2::BitMatrix sub = gf2::select_rows(build_generator(spec), rows);
  gf2::Transcript full;
  try {
    full = gf2::eliminate(sub);
  } catch (const Error& e) {
    if (e.code() != Errc::singular_matrix) throw;
    throw Error(Errc::decode_failure, "surviving rows of the generator have rank < k");
  }
  if (counter) {
    counter->elimination_row_xors += full.stats().row_xors;
    counter->elimination_bit_ops += full.stats().bit_ops;
  }

  const gf2::Transcript plan = full.pruned(missing);
  std::vector<Block> payload(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) payload[r] = word.blocks[rows[r]];
  if (counter) counter->copied_bytes += rows.size() * word.block_size;

  plan.replay(std::span<Block>(payload),
              [counter](Block& dst, const Block& src) { xor_into(dst, src, counter); });
  for (std::size_t j : missing) data[j] = std::move(payload[plan.pivot_rows()[j]]);
  return data;
}

ScrubReport scrub(const CodeSpec& spec, const Codeword& word, OpCounter* counter) {
  spec.validate();
  check_word(spec, word);
  if (word.present_count() != spec.n) throw Error(Errc::incomplete_codeword, "scrub needs every block");

  const gf2::BitMatrix r = build_parity_part(spec);
  ScrubReport report;
  for (std::size_t i = 0; i < spec.parity_count(); ++i) {
    Block syndrome = word.blocks[spec.k + i];
    for (std::size_t j = 0; j < spec.k; ++j) {
      if (r.get(i, j)) xor_into(syndrome, word.blocks[j], counter);
    }
    if (!all_zero(syndrome)) report.fired.push_back(i);
  }
  report.consistent = report.fired.empty();
  return report;
}

CodeMetrics metrics(const CodeSpec& spec) {
  spec.validate();
  CodeMetrics m;
  const std::size_t redundancy = spec.parity_count();
  m.fault_tolerance_estimate = redundancy > kReliabilityMargin ? redundancy - kReliabilityMargin : 0;
  m.storage_efficiency = static_cast<double>(spec.k) / static_cast<double>(spec.n);
  m.ones_in_r = build_parity_part(spec).count_ones();
  m.survival_probability =
      randmat::prob_tall_full_rank(spec.k, redundancy - m.fault_tolerance_estimate);
  return m;
}

}  // namespace rbec
