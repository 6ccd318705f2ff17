#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rbec/code.hpp"
#include "rbec/randmat.hpp"

using namespace rbec;

namespace {

std::vector<Block> random_blocks(std::size_t k, std::size_t size, std::mt19937_64& rng) {
  std::vector<Block> data(k, Block(size));
  for (auto& b : data)
    for (auto& v : b) v = static_cast<std::uint8_t>(rng());
  return data;
}

// Codeword bit by bit: block i, bit b = XOR over j of G(i, j) & data_j bit b.
std::vector<Block> oracle_codeword(const oracle::Dense& g, const std::vector<Block>& data) {
  const std::size_t size = data[0].size();
  std::vector<Block> out(g.size(), Block(size, 0));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t byte = 0; byte < size; ++byte)
      for (int bit = 0; bit < 8; ++bit) {
        unsigned acc = 0;
        for (std::size_t j = 0; j < data.size(); ++j) acc ^= g[i][j] & ((data[j][byte] >> bit) & 1U);
        out[i][byte] |= static_cast<std::uint8_t>(acc << bit);
      }
  return out;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("CodeSpec validation") {
  const CodeSpec s = CodeSpec::fresh(40, 25, 42);
  CHECK(s.parity_count() == 15);
  CHECK(s.data_col_ids.size() == 25);
  CHECK(s.parity_row_ids.back() == 14);
  CHECK_NOTHROW(s.validate());

  CHECK(code_of([] { CodeSpec::fresh(5, 5, 1).validate(); }) == Errc::invalid_spec);
  CHECK(code_of([] { CodeSpec::fresh(5, 0, 1).validate(); }) == Errc::invalid_spec);
  CodeSpec dup = s;
  dup.data_col_ids[3] = dup.data_col_ids[4];
  CHECK(code_of([&] { dup.validate(); }) == Errc::invalid_spec);
  CodeSpec short_ids = s;
  short_ids.parity_row_ids.pop_back();
  CHECK(code_of([&] { short_ids.validate(); }) == Errc::invalid_spec);
}

TEST_CASE("generator and parity-check structure") {
  const CodeSpec s = CodeSpec::fresh(40, 25, 42);
  const gf2::BitMatrix g = build_generator(s);
  const gf2::BitMatrix r = build_parity_part(s);
  const gf2::BitMatrix h = build_parity_check(s);
  CHECK(g.rows() == 40);
  CHECK(g.cols() == 25);
  CHECK(h.rows() == 40);
  CHECK(h.cols() == 15);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 25; ++j)
      CHECK(g.get(i, j) == (i < 25 ? i == j : randmat::derive_entry({42, 0.5}, {i - 25, j})));
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 25; ++j) CHECK(r.get(i, j) == g.get(25 + i, j));
  CHECK(multiply(transpose(g), h).is_zero());
  CHECK(oracle::multiply(oracle::transpose(oracle::to_dense(g)), oracle::to_dense(h)) ==
        oracle::Dense(25, std::vector<std::uint8_t>(15, 0)));
}

TEST_CASE("encode matches a bitwise reference") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    const std::size_t n = k + 1 + rng() % 12;
    const std::size_t size = 1 + rng() % 40;
    const CodeSpec s = CodeSpec::fresh(n, k, rng());
    const auto data = random_blocks(k, size, rng);
    const Codeword w = encode(s, data);
    CHECK(w.size() == n);
    CHECK(w.present_count() == n);
    CHECK(w.block_size == size);
    CHECK(w.blocks == oracle_codeword(oracle::to_dense(build_generator(s)), data));
    CHECK(scrub(s, w).consistent);
  }
}

TEST_CASE("encode op counts") {
  const CodeSpec s = CodeSpec::fresh(40, 25, 42);
  std::mt19937_64 rng(2);
  const auto data = random_blocks(25, 100, rng);
  OpCounter c;
  encode(s, data, &c);
  const std::size_t ones = build_parity_part(s).count_ones();
  CHECK(c.block_xors == ones);
  CHECK(c.xor_words == ones * 13);  // ceil(100 / 8)
  CHECK(c.elimination_bit_ops == 0);
}

TEST_CASE("encode input errors") {
  const CodeSpec s = CodeSpec::fresh(8, 4, 1);
  CHECK(code_of([&] { encode(s, std::vector<Block>{}); }) == Errc::empty_data);
  CHECK(code_of([&] { encode(s, std::vector<Block>(4, Block{})); }) == Errc::empty_data);
  std::vector<Block> uneven(4, Block(8));
  uneven[2].resize(7);
  CHECK(code_of([&] { encode(s, uneven); }) == Errc::unequal_block_lengths);
  CHECK(code_of([&] { encode(s, std::vector<Block>(3, Block(8))); }) == Errc::dimension_mismatch);
}

TEST_CASE("decode with no loss is a copy") {
  const CodeSpec s = CodeSpec::fresh(40, 25, 42);
  std::mt19937_64 rng(3);
  const auto data = random_blocks(25, 64, rng);
  Codeword w = encode(s, data);
  w.erase(30);
  OpCounter c;
  CHECK(decode(s, w, &c) == data);
  CHECK(c.block_xors == 0);
  CHECK(c.xor_words == 0);
  CHECK(c.elimination_bit_ops == 0);
}

TEST_CASE("decode agrees with the rank of the surviving rows") {
  std::mt19937_64 rng(4);
  int failures = 0, successes = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 10;
    const std::size_t n = k + 1 + rng() % 8;
    const CodeSpec s = CodeSpec::fresh(n, k, rng());
    const auto data = random_blocks(k, 9, rng);
    Codeword w = encode(s, data);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t lose = rng() % (n - k + 1);
    oracle::Dense surviving;
    const oracle::Dense g = oracle::to_dense(build_generator(s));
    for (std::size_t i = 0; i < lose; ++i) w.erase(order[i]);
    for (std::size_t i = 0; i < n; ++i)
      if (w.present[i]) surviving.push_back(g[i]);
    if (oracle::rank(surviving) == k) {
      CHECK(decode(s, w) == data);
      ++successes;
    } else {
      CHECK(code_of([&] { decode(s, w); }) == Errc::decode_failure);
      ++failures;
    }
  }
  CHECK(successes > 0);
  CHECK(failures > 0);
}

TEST_CASE("decode with too few blocks") {
  const CodeSpec s = CodeSpec::fresh(6, 4, 1);
  std::mt19937_64 rng(5);
  Codeword w = encode(s, random_blocks(4, 4, rng));
  w.erase(0);
  w.erase(1);
  w.erase(5);
  CHECK(code_of([&] { decode(s, w); }) == Errc::insufficient_blocks);
}

TEST_CASE("decode failure rate follows the tall-matrix formula") {
  // Losing m data blocks leaves a random (parity present) x m system.
  const std::size_t k = 20, parity = 12, m = 10, trials = 20000;
  std::mt19937_64 rng(6);
  const std::vector<Block> data = random_blocks(k, 8, rng);
  std::size_t failed = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const CodeSpec s = CodeSpec::fresh(k + parity, k, randmat::trial_seed(77, t));
    Codeword w = encode(s, data);
    for (std::size_t j = 0; j < m; ++j) w.erase(j);
    try {
      const auto out = decode(s, w);
      CHECK(out == data);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::decode_failure);
      ++failed;
    }
  }
  const double expected = 1.0 - static_cast<double>(oracle::product_via_logs(parity - m + 1, parity));
  const double sigma = std::sqrt(expected * (1 - expected) / trials);
  CHECK(std::abs(static_cast<double>(failed) / trials - expected) < 4 * sigma);
}

TEST_CASE("decode work counters") {
  const CodeSpec s = CodeSpec::fresh(40, 25, 42);
  std::mt19937_64 rng(7);
  const auto data = random_blocks(25, 16, rng);
  Codeword w = encode(s, data);
  for (std::size_t j = 0; j < 3; ++j) w.erase(j);
  OpCounter c;
  CHECK(decode(s, w, &c) == data);
  CHECK(c.elimination_row_xors > 0);
  CHECK(c.elimination_bit_ops == c.elimination_row_xors * 25);
  CHECK(c.xor_words == c.block_xors * 2);
}

TEST_CASE("scrub detects corruption") {
  const CodeSpec s = CodeSpec::fresh(20, 12, 9);
  std::mt19937_64 rng(8);
  const Codeword clean = encode(s, random_blocks(12, 16, rng));
  CHECK(scrub(s, clean).consistent);
  CHECK(scrub(s, clean).fired.empty());

  const gf2::BitMatrix g = build_generator(s);
  for (std::size_t i = 0; i < 20; ++i) {
    Codeword w = clean;
    w.blocks[i][rng() % 16] ^= static_cast<std::uint8_t>(1U << (rng() % 8));
    const ScrubReport r = scrub(s, w);
    // Checks that see block i: parity row i itself, or every row whose R entry
    // in column i is set when i is a data block.
    std::vector<std::size_t> expected;
    for (std::size_t p = 0; p < 8; ++p)
      if ((i < 12 && g.get(12 + p, i)) || i == 12 + p) expected.push_back(p);
    CHECK(r.fired == expected);
    CHECK(r.consistent == expected.empty());
  }

  Codeword partial = clean;
  partial.erase(4);
  CHECK(code_of([&] { scrub(s, partial); }) == Errc::incomplete_codeword);
}

TEST_CASE("metrics") {
  const CodeMetrics m = metrics(CodeSpec::fresh(40, 25, 42));
  CHECK(m.fault_tolerance_estimate == 5);
  CHECK(m.storage_efficiency == 0.625);
  CHECK(m.ones_in_r == build_parity_part(CodeSpec::fresh(40, 25, 42)).count_ones());
  CHECK(m.survival_probability == doctest::Approx(randmat::prob_tall_full_rank(25, 10)));

  const CodeMetrics small = metrics(CodeSpec::fresh(12, 8, 1));
  CHECK(small.fault_tolerance_estimate == 0);
  CHECK(small.survival_probability == doctest::Approx(randmat::prob_tall_full_rank(8, 4)));
}
