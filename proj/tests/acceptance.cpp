// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "rbec/arraystore.hpp"
#include "rbec/cli.hpp"
#include "rbec/code.hpp"
#include "rbec/randmat.hpp"

using namespace rbec;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %2d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("rbec-accept-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<Block> random_blocks(std::size_t k, std::size_t size, std::mt19937_64& rng) {
  std::vector<Block> data(k, Block(size));
  for (auto& b : data)
    for (auto& v : b) v = static_cast<std::uint8_t>(rng());
  return data;
}

std::vector<std::uint8_t> random_bytes(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng());
  return v;
}

bool orthogonal(const CodeSpec& s) {
  return multiply(transpose(build_generator(s)), build_parity_check(s)).is_zero();
}

// Entries of R keyed by (row id, column id).
std::map<std::pair<std::uint64_t, std::uint64_t>, bool> entries_by_id(const CodeSpec& s) {
  const gf2::BitMatrix r = build_parity_part(s);
  std::map<std::pair<std::uint64_t, std::uint64_t>, bool> out;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) out[{s.parity_row_ids[i], s.data_col_ids[j]}] = r.get(i, j);
  return out;
}

bool shared_entries_equal(const CodeSpec& a, const CodeSpec& b) {
  const auto ea = entries_by_id(a);
  for (const auto& [key, bit] : entries_by_id(b)) {
    const auto it = ea.find(key);
    if (it != ea.end() && it->second != bit) return false;
  }
  return true;
}

std::string shape(const gf2::BitMatrix& g) { return std::to_string(g.rows()) + "x" + std::to_string(g.cols()); }

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  const int code = cli::run({"rankprob", "--max-n", "30", "--trials", "100000"}, out, err);
  const double secs = seconds_since(t0);

  // Columns: n, analytic, empirical, stderr.
  std::istringstream csv(out.str());
  std::string line;
  std::getline(csv, line);
  std::size_t rows = 0;
  double s30 = 0.0, worst = 0.0;
  while (std::getline(csv, line)) {
    std::size_t n = 0;
    double analytic = 0, empirical = 0, se = 0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%lf", &n, &analytic, &empirical, &se) != 4) break;
    ++rows;
    s30 = analytic;
    worst = std::max(worst, std::abs(empirical - analytic) / se);
  }
  const bool ok = code == 0 && rows == 30 && std::abs(s30 - 0.28879) <= 1e-4 && worst <= 4.0 && secs < 60.0;
  report(1, "rank-probability constant", ok,
         fmt("rows=%zu S(30)=%.8f |S-0.28879|=%.2e worst=%.2f stderr runtime=%.1fs", rows, s30,
             std::abs(s30 - 0.28879), worst, secs));
}

void criterion2() {
  const auto mc = randmat::monte_carlo_full_rank({cli::kDefaultSeed, 0.5}, 30, 20, 100000);
  const double analytic = randmat::prob_tall_full_rank(20, 10);
  const double sigma = std::sqrt(analytic * (1 - analytic) / 1e5);
  const double z = std::abs(mc.estimate - analytic) / sigma;
  const bool ok = z <= 4.0 && analytic >= 0.999;
  report(2, "tall-matrix reliability", ok,
         fmt("analytic=%.8f empirical=%.6f z=%.2f", analytic, mc.estimate, z));
}

std::pair<std::size_t, std::size_t> orthogonality_sweep(std::uint64_t base) {
  std::size_t good = 0, total = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const std::uint64_t h = randmat::trial_seed(base, t);
    const std::size_t n = 2 + h % 63;                      // 2..64
    const std::size_t k = 1 + (h >> 8) % (n - 1);           // 1..n-1
    good += orthogonal(CodeSpec::fresh(n, k, randmat::mix64(h)));
    ++total;
  }
  return {good, total};
}

void criterion3() {
  const auto [good, total] = orthogonality_sweep(3);
  report(3, "orthogonality", good == total, fmt("%zu/%zu specs with G^T H = 0", good, total));
}

struct ErasureStats {
  std::size_t trials = 0, ok = 0, decode_failures = 0, wrong = 0;
  std::size_t three_disk = 0, three_disk_failures = 0;
};

// 5 data + 3 parity disks, depth 5. Each trial draws a fresh generator, random
// data, a disk-loss count in 0..3 and that many distinct disks.
ErasureStats erasure_trials(std::size_t trials, std::uint64_t base) {
  const layout::ArrayGeometry g{5, 3, 5};
  std::mt19937_64 rng(base);
  ErasureStats st;
  for (std::size_t t = 0; t < trials; ++t) {
    const CodeSpec spec = CodeSpec::fresh(g.n(), g.k(), randmat::trial_seed(base, t));
    const auto data = random_blocks(g.k(), 16, rng);
    Codeword w = encode(spec, data);
    std::vector<std::size_t> disks(g.disks());
    std::iota(disks.begin(), disks.end(), 0);
    std::shuffle(disks.begin(), disks.end(), rng);
    const std::size_t lost = rng() % 4;
    for (std::size_t d = 0; d < lost; ++d)
      for (std::size_t e : layout::disk_elements(g, disks[d])) w.erase(e);
    ++st.trials;
    st.three_disk += lost == 3;
    try {
      if (decode(spec, w) == data) {
        ++st.ok;
      } else {
        ++st.wrong;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::decode_failure) throw;
      ++st.decode_failures;
      st.three_disk_failures += lost == 3;
    }
  }
  return st;
}

// Failure probability when 3 of the 8 disks are lost, averaged over which
// disks: losing d data disks leaves a random (5d) x (5d) system.
double exact_three_disk_mixture() {
  double p = 0.0;
  for (std::size_t d = 0; d <= 3; ++d) {
    const double ways = oracle::binomial(5, d) * oracle::binomial(3, 3 - d);
    const double fail = d == 0 ? 0.0 : 1.0 - static_cast<double>(oracle::product_via_logs(1, 5 * d));
    p += ways * fail;
  }
  return p / oracle::binomial(8, 3);
}

void criterion4() {
  const ErasureStats st = erasure_trials(10000, 4);
  const double rate = static_cast<double>(st.three_disk_failures) / static_cast<double>(st.three_disk);
  const double stated = 1.0 - randmat::prob_tall_full_rank(25, 0);
  const double mixture = exact_three_disk_mixture();
  const double sigma_stated = std::sqrt(stated * (1 - stated) / static_cast<double>(st.three_disk));
  const double sigma_mix = std::sqrt(mixture * (1 - mixture) / static_cast<double>(st.three_disk));
  const double z_stated = std::abs(rate - stated) / sigma_stated;
  const double z_mix = std::abs(rate - mixture) / sigma_mix;
  const bool ok = st.wrong == 0 && st.ok + st.decode_failures == st.trials && z_stated <= 4.0 && z_mix <= 4.0;
  report(4, "round trip under erasure", ok,
         fmt("%zu trials: %zu decoded, %zu decode-failure, %zu wrong; 3-disk loss %zu/%zu=%.4f "
             "vs 1-S(25)=%.4f (z=%.2f), exact mixture %.4f (z=%.2f)",
             st.trials, st.ok, st.decode_failures, st.wrong, st.three_disk_failures, st.three_disk, rate, stated,
             z_stated, mixture, z_mix));
}

std::vector<std::uint64_t> write_counters(const store::ArrayMetadata& m) {
  std::vector<std::uint64_t> w;
  for (const auto& d : m.disks) w.push_back(d.write_counter);
  return w;
}

void criterion5() {
  TempDir t("c5");
  auto a = store::DiskArray::init(t.path, {5, 3, 5, 256, 5});
  std::mt19937_64 rng(5);
  a.put(random_bytes(25 * 256, rng));
  const auto before = write_counters(a.metadata());

  a.remove_parity_disk(7);
  const auto after_remove = write_counters(a.metadata());
  const bool remove_ok = after_remove == before;

  const std::uint64_t id = a.add_parity_disk();
  const auto m = a.metadata();
  const auto after_add = write_counters(m);
  bool others_same = true;
  for (std::size_t i = 0; i < before.size(); ++i) others_same &= after_add[i] == before[i];
  const std::uint64_t new_writes = m.disk(id).write_counter;
  const bool ok = remove_ok && others_same && new_writes == m.geometry.strip_depth && a.scrub().consistent;
  report(5, "expansion write-minimality", ok,
         fmt("remove-parity changed %s counters; add-parity wrote %llu blocks on new disk, others %s",
             remove_ok ? "no" : "some", static_cast<unsigned long long>(new_writes),
             others_same ? "untouched" : "touched"));
}

void criterion6() {
  std::mt19937_64 rng(6);
  bool ok = true;
  std::string detail;

  {
    TempDir t("c6a");
    auto a = store::DiskArray::init(t.path, {5, 3, 5, 64, 6});
    const auto obj = random_bytes(20 * 64, rng);
    a.put(obj);
    const CodeSpec s0 = a.metadata().code;
    a.remove_data_disk(1);
    const CodeSpec s1 = a.metadata().code;
    a.add_data_disk();
    const CodeSpec s2 = a.metadata().code;
    const std::string shapes =
        shape(build_generator(s0)) + "->" + shape(build_generator(s1)) + "->" + shape(build_generator(s2));
    ok &= shapes == "40x25->35x20->40x25";
    ok &= shared_entries_equal(s0, s1) && shared_entries_equal(s1, s2) && shared_entries_equal(s0, s2);
    ok &= a.get() == obj && a.scrub().consistent;
    detail += "data " + shapes;
  }
  {
    TempDir t("c6b");
    auto a = store::DiskArray::init(t.path, {5, 3, 5, 64, 6});
    const auto obj = random_bytes(25 * 64, rng);
    a.put(obj);
    const CodeSpec s0 = a.metadata().code;
    a.remove_parity_disk(7);
    const CodeSpec s1 = a.metadata().code;
    a.add_parity_disk();
    const CodeSpec s2 = a.metadata().code;
    const std::string shapes =
        shape(build_generator(s0)) + "->" + shape(build_generator(s1)) + "->" + shape(build_generator(s2));
    ok &= shapes == "40x25->35x25->40x25";
    ok &= shared_entries_equal(s0, s1) && shared_entries_equal(s1, s2);
    ok &= a.get() == obj && a.scrub().consistent;
    detail += ", parity " + shapes;
  }
  report(6, "expansion matrix shapes", ok, detail + (ok ? ", shared R entries identical" : ""));
}

void criterion7() {
  const CodeMetrics m = metrics(CodeSpec::fresh(40, 25, 7));
  const bool ok = m.fault_tolerance_estimate == 5 && m.storage_efficiency == 0.625;
  report(7, "metrics formulas", ok, fmt("t_estimate=%zu e=%.6f", m.fault_tolerance_estimate, m.storage_efficiency));
}

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8);

  // Encode: xor words per unit of k * (n - k) * words-per-block.
  std::vector<double> enc;
  auto encode_ratio = [&](std::size_t k, std::size_t parity, std::size_t bs) {
    const CodeSpec s = CodeSpec::fresh(k + parity, k, 8);
    OpCounter c;
    encode(s, random_blocks(k, bs, rng), &c);
    return static_cast<double>(c.xor_words) / static_cast<double>(k * parity * ((bs + 7) / 8));
  };
  for (std::size_t k : {64, 128, 256}) enc.push_back(encode_ratio(k, 64, 1024));
  for (std::size_t bs : {256, 512, 1024}) enc.push_back(encode_ratio(64, 64, bs));
  const double enc_spread = *std::max_element(enc.begin(), enc.end()) / *std::min_element(enc.begin(), enc.end());

  // Decode: elimination bit operations per k^3 with every data block erased.
  std::vector<double> dec;
  for (std::size_t k : {8, 16, 32}) {
    const auto reports = cli::run_bench({{k * 64}, {k, k + 10, 1}, 1, 8});
    dec.push_back(static_cast<double>(reports[1].elimination_bit_ops) / std::pow(static_cast<double>(k), 3));
  }
  const double dec_spread = *std::max_element(dec.begin(), dec.end()) / *std::min_element(dec.begin(), dec.end());
  const double secs = seconds_since(t0);
  const bool ok = enc_spread <= 1.10 && dec_spread <= 2.0 && secs < 300.0;
  report(8, "complexity scaling", ok,
         fmt("encode ratio spread %.4f (<=1.10), decode bit_ops/k^3 = %.3f %.3f %.3f spread %.3f (<=2), %.1fs", enc_spread,
             dec[0], dec[1], dec[2], dec_spread, secs));
}

bool fast_path(const store::DiskArray& a, const std::vector<std::uint8_t>& obj, std::uint64_t* words) {
  OpCounter c;
  const bool same = a.get(&c) == obj;
  *words = c.xor_words + c.block_xors;
  return same && *words == 0;
}

void criterion9() {
  TempDir t("c9");
  std::mt19937_64 rng(9);
  auto a = store::DiskArray::init(t.path, {5, 3, 5, 128, 9});
  const auto obj = random_bytes(25 * 128 - 17, rng);
  a.put(obj);
  std::uint64_t words = 0;
  const bool ok = fast_path(a, obj, &words);
  report(9, "systematic fast path", ok, fmt("xor operations=%llu, bytes identical=%s",
                                            static_cast<unsigned long long>(words), ok ? "yes" : "no"));
}

// Every pattern of up to 3 lost disks on a reopened array must behave exactly
// as the codec predicts for the persisted generator.
void criterion10() {
  bool ok = true;
  std::size_t patterns = 0, recovered = 0, refused = 0;
  std::mt19937_64 rng(10);
  for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
    TempDir t("c10-" + std::to_string(seed));
    std::vector<std::uint8_t> obj;
    CodeSpec original;
    {
      auto a = store::DiskArray::init(t.path, {5, 3, 5, 32, seed});
      obj = random_bytes(25 * 32, rng);
      a.put(obj);
      original = a.metadata().code;
    }
    const auto a = store::DiskArray::open(t.path);
    const store::ArrayMetadata meta = a.metadata();
    ok &= meta.code == original && orthogonal(meta.code);

    std::uint64_t words = 0;
    ok &= fast_path(a, obj, &words);

    const auto data_blocks = [&] {
      std::vector<Block> d(25);
      for (std::size_t e = 0; e < 25; ++e) d[e] = Block(obj.begin() + e * 32, obj.begin() + (e + 1) * 32);
      return d;
    }();
    const Codeword full = encode(meta.code, data_blocks);
    const layout::ArrayGeometry g = meta.geometry;
    for (std::uint32_t mask = 1; mask < 256; ++mask) {
      if (std::popcount(mask) > 3) continue;
      ++patterns;
      const fs::path scratch = t.path.string() + "-scratch";
      fs::remove_all(scratch);
      fs::copy(t.path, scratch, fs::copy_options::recursive);
      auto arr = store::DiskArray::open(scratch);
      Codeword w = full;
      for (std::uint64_t d = 0; d < 8; ++d) {
        if (!(mask >> d & 1U)) continue;
        arr.fail_disk(d);
        for (std::size_t e : layout::disk_elements(g, d)) w.erase(e);
      }
      bool codec_ok = true;
      try {
        decode(meta.code, w);
      } catch (const Error&) {
        codec_ok = false;
      }
      try {
        const bool same = arr.get() == obj;
        ok &= codec_ok && same;
        ++recovered;
      } catch (const Error& e) {
        ok &= !codec_ok && e.code() == Errc::unrecoverable;
        ++refused;
      }
      fs::remove_all(scratch);
    }
    ok &= a.scrub().consistent && fast_path(a, obj, &words);
  }
  const auto [good, total] = orthogonality_sweep(3);
  ok &= good == total;
  report(10, "persistence", ok,
         fmt("3 reopened arrays: metadata identical, G^T H = 0, fast path exact, %zu loss patterns "
             "(%zu recovered, %zu unrecoverable) match the codec",
             patterns, recovered, refused));
}

}  // namespace

int main() {
  const std::vector<void (*)()> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                    criterion6, criterion7, criterion8, criterion9, criterion10};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "exception", false, e.what());
    }
  }
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "SOME FAILED", failures);
  return failures == 0 ? 0 : 1;
}
