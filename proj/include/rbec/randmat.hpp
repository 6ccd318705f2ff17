#pragma once

// Seeded random {0,1} matrices and the rank probabilities that make a random
// binary generator usable as an erasure code.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rbec/bitmatrix.hpp"

namespace rbec::randmat {

// Identifier of the entry derivation below. Stored in array metadata; any
// change to mix64 or derive_entry must come with a new identifier.
inline constexpr std::string_view kDerivationId = "rbec-mix64-v1";

struct RandomMatrixSpec {
  std::uint64_t seed = 0;
  double p = 0.5;  // probability of a 1 entry, 0 < p < 1
};

struct EntryAddress {
  std::uint64_t row_id = 0;
  std::uint64_t col_id = 0;
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-mode hash of one matrix position:
//   row_key = mix64(seed ^ mix64((row_id + 1) * 0x9E3779B97F4A7C15))
//   h       = mix64(row_key + (col_id + 1) * 0xD1B54A32D192ED03)
// The top 53 bits of h form u in [0, 1); the entry is 1 iff u > 1 - p, so
// u <= 1 - p gives 0 exactly as a uniform draw thresholded at 1 - p.
constexpr std::uint64_t row_key(std::uint64_t seed, std::uint64_t row_id) noexcept {
  return mix64(seed ^ mix64((row_id + 1) * 0x9E3779B97F4A7C15ULL));
}

constexpr std::uint64_t entry_hash(std::uint64_t row_key_value, std::uint64_t col_id) noexcept {
  return mix64(row_key_value + (col_id + 1) * 0xD1B54A32D192ED03ULL);
}

bool derive_entry(const RandomMatrixSpec& spec, EntryAddress addr);

// Entry (i, j) = derive_entry(spec, {i, j}).
gf2::BitMatrix random_matrix(const RandomMatrixSpec& spec, std::size_t rows, std::size_t cols);
// Entry (i, j) = derive_entry(spec, {row_ids[i], col_ids[j]}).
gf2::BitMatrix random_matrix(const RandomMatrixSpec& spec, std::span<const std::uint64_t> row_ids,
                             std::span<const std::uint64_t> col_ids);

// Seed of Monte-Carlo trial `index` derived from a base seed.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

// Product over i = 1..n of (1 - 2^-i): probability that a uniform n x n
// binary matrix is nonsingular.
double prob_square_nonsingular(std::size_t n);
// Product over i = extra+1..n+extra of (1 - 2^-i): probability that a uniform
// (n + extra) x n binary matrix has full column rank.
double prob_tall_full_rank(std::size_t n, std::size_t extra);
// prob_square_nonsingular(1..n_max), strictly decreasing.
std::vector<double> monotone_check(std::size_t n_max);

struct MonteCarloResult {
  std::uint64_t trials = 0;
  std::uint64_t full_rank = 0;
  double estimate = 0.0;
  double std_error = 0.0;
};

// Fraction of `trials` matrices (trial t seeded with trial_seed(base.seed, t))
// whose rank equals `cols`.
MonteCarloResult monte_carlo_full_rank(const RandomMatrixSpec& base, std::size_t rows,
                                       std::size_t cols, std::uint64_t trials);

}  // namespace rbec::randmat
