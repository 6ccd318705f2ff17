#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests drive it with in-memory streams.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbec/layout.hpp"

namespace rbec::cli {

// Stable process exit statuses.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kUnrecoverable = 3,  // decode failure or too few blocks online
  kIo = 4,             // io-error or corrupt metadata
  kRejected = 5,       // refused, object-too-large, unknown-disk, no-object, directory-not-empty
  kInconsistent = 6,   // scrub found a nonzero syndrome
};

inline constexpr const char* kJsonSchema = "rbec-cli/1";
inline constexpr const char* kSeedEnv = "RBEC_SEED";
inline constexpr std::uint64_t kDefaultSeed = 1;

struct RankProbRow {
  std::size_t x = 0;  // n for the square sweep, extra for the tall sweep
  double analytic = 0.0;
  std::optional<double> empirical;
  std::optional<double> std_error;
};

// Square sweep: n = 1..max_n, n x n matrices.
std::vector<RankProbRow> rank_prob_square(std::size_t max_n, std::uint64_t trials, std::uint64_t seed);
// Tall sweep: extra = 0..max_extra, (n + extra) x n matrices.
std::vector<RankProbRow> rank_prob_tall(std::size_t n, std::size_t max_extra, std::uint64_t trials,
                                        std::uint64_t seed);

struct BenchOptions {
  std::vector<std::size_t> sizes;  // total data bytes per codeword
  layout::ArrayGeometry geometry{5, 3, 5};
  std::size_t repeat = 1;
  std::uint64_t seed = kDefaultSeed;
};

struct BenchReport {
  std::string operation;  // "encode" or "decode"
  std::size_t size = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t block_size = 0;
  std::size_t erased = 0;
  double wall_seconds = 0.0;  // mean over repeats
  std::uint64_t xor_ops = 0;  // 8-byte word XORs
  std::uint64_t block_xors = 0;
  std::uint64_t elimination_bit_ops = 0;
  double throughput = 0.0;  // size / wall_seconds
};

// Encode, then decode with min(k, max(0, n - k - 10)) randomly chosen data
// blocks erased so the parity rows must be used.
std::vector<BenchReport> run_bench(const BenchOptions& options);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rbec::cli
