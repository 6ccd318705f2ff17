#include "rbec/randmat.hpp"

#include <algorithm>
#include <cmath>

namespace rbec::randmat {

namespace {

void check_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::invalid_argument, "p must lie in (0, 1)");
}

// u = (h >> 11) * 2^-53 exceeds 1 - p exactly when the integer h >> 11
// exceeds floor((1 - p) * 2^53); scaling by a power of two is exact.
std::uint64_t cutoff_for(double p) {
  return static_cast<std::uint64_t>(std::floor((1.0 - p) * 0x1.0p53));
}

bool threshold(std::uint64_t h, std::uint64_t cutoff) { return (h >> 11) > cutoff; }

}  // namespace

bool derive_entry(const RandomMatrixSpec& spec, EntryAddress addr) {
  check_p(spec.p);
  return threshold(entry_hash(row_key(spec.seed, addr.row_id), addr.col_id), cutoff_for(spec.p));
}

gf2::BitMatrix random_matrix(const RandomMatrixSpec& spec, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw Error(Errc::invalid_dimension, "random matrix needs rows, cols >= 1");
  check_p(spec.p);
  const std::uint64_t cutoff = cutoff_for(spec.p);
  std::vector<std::uint64_t> keys(rows);
  for (std::size_t i = 0; i < rows; ++i) keys[i] = row_key(spec.seed, i);
  return gf2::BitMatrix::generate(rows, cols, [&](std::size_t i, std::size_t j) {
    return threshold(entry_hash(keys[i], j), cutoff);
  });
}

gf2::BitMatrix random_matrix(const RandomMatrixSpec& spec, std::span<const std::uint64_t> row_ids,
                             std::span<const std::uint64_t> col_ids) {
  check_p(spec.p);
  const std::uint64_t cutoff = cutoff_for(spec.p);
  std::vector<std::uint64_t> keys(row_ids.size());
  for (std::size_t i = 0; i < row_ids.size(); ++i) keys[i] = row_key(spec.seed, row_ids[i]);
  return gf2::BitMatrix::generate(row_ids.size(), col_ids.size(), [&](std::size_t i, std::size_t j) {
    return threshold(entry_hash(keys[i], col_ids[j]), cutoff);
  });
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return mix64(base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

double prob_square_nonsingular(std::size_t n) {
  if (n == 0) throw Error(Errc::invalid_dimension, "n must be at least 1");
  return prob_tall_full_rank(n, 0);
}

double prob_tall_full_rank(std::size_t n, std::size_t extra) {
  if (n == 0) throw Error(Errc::invalid_dimension, "n must be at least 1");
  // Largest factors first.
  double prod = 1.0;
  for (std::size_t i = n + extra; i > extra; --i) {
    prod *= 1.0 - std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(i, 2000)));
  }
  return prod;
}

std::vector<double> monotone_check(std::size_t n_max) {
  if (n_max < 2) throw Error(Errc::invalid_dimension, "n_max must be at least 2");
  std::vector<double> out;
  out.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) out.push_back(prob_square_nonsingular(n));
  return out;
}

MonteCarloResult monte_carlo_full_rank(const RandomMatrixSpec& base, std::size_t rows,
                                       std::size_t cols, std::uint64_t trials) {
  if (rows == 0 || cols == 0) throw Error(Errc::invalid_dimension, "matrix needs rows, cols >= 1");
  if (trials == 0) throw Error(Errc::invalid_dimension, "trials must be at least 1");
  check_p(base.p);

  MonteCarloResult r;
  r.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const RandomMatrixSpec spec{trial_seed(base.seed, t), base.p};
    if (gf2::rank(random_matrix(spec, rows, cols)) == cols) ++r.full_rank;
  }
  r.estimate = static_cast<double>(r.full_rank) / static_cast<double>(trials);
  r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
  return r;
}

}  // namespace rbec::randmat
