#include "rbec/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rbec/arraystore.hpp"
#include "rbec/code.hpp"
#include "rbec/randmat.hpp"

namespace rbec::cli {

namespace {

using json = nlohmann::ordered_json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, std::string(kSeedEnv) + " is not an unsigned integer");
    }
  }
  return kDefaultSeed;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::decode_failure:
    case Errc::insufficient_blocks:
    case Errc::unrecoverable:
      return kUnrecoverable;
    case Errc::io_error:
    case Errc::corrupt_metadata:
      return kIo;
    case Errc::refused:
    case Errc::object_too_large:
    case Errc::unknown_disk:
    case Errc::no_object:
    case Errc::directory_not_empty:
      return kRejected;
    case Errc::invalid_argument:
    case Errc::invalid_dimension:
    case Errc::invalid_spec:
    case Errc::index_out_of_range:
      return kUsage;
    default:
      return kInternal;
  }
}

std::vector<std::uint8_t> read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::vector<std::uint8_t>& bytes, std::ostream& out) {
  if (path == "-") {
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::io_error, "cannot write " + path);
}

json summary(const store::ArrayMetadata& meta) {
  const CodeMetrics m = metrics(meta.code);
  return {{"n", meta.code.n},
          {"k", meta.code.k},
          {"t_estimate", m.fault_tolerance_estimate},
          {"efficiency", m.storage_efficiency},
          {"data_disks", meta.geometry.data_disks},
          {"parity_disks", meta.geometry.parity_disks},
          {"strip_depth", meta.geometry.strip_depth}};
}

std::string summary_line(const store::ArrayMetadata& meta) {
  const CodeMetrics m = metrics(meta.code);
  std::ostringstream ss;
  ss << "n=" << meta.code.n << " k=" << meta.code.k << " t_estimate=" << m.fault_tolerance_estimate
     << " efficiency=" << fixed(m.storage_efficiency, 6) << " disks=" << meta.geometry.data_disks << "+"
     << meta.geometry.parity_disks << "x" << meta.geometry.strip_depth;
  return ss.str();
}

layout::ArrayGeometry parse_geometry(const std::string& text) {
  layout::ArrayGeometry g;
  char c1 = 0;
  char c2 = 0;
  std::istringstream ss(text);
  if (!(ss >> g.data_disks >> c1 >> g.parity_disks >> c2 >> g.strip_depth) || c1 != ':' || c2 != ':' ||
      !ss.eof()) {
    throw Error(Errc::invalid_argument, "geometry must be DATA:PARITY:DEPTH, got '" + text + "'");
  }
  g.validate();
  return g;
}

// Fisher-Yates driven by the counter-mode hash so outputs do not depend on
// the standard library's distribution implementations.
std::vector<std::size_t> pick(std::size_t count, std::size_t from, std::uint64_t seed) {
  std::vector<std::size_t> idx(from);
  for (std::size_t i = 0; i < from; ++i) idx[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t r = randmat::trial_seed(seed, i);
    std::swap(idx[i], idx[i + r % (from - i)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Block> random_blocks(std::size_t count, std::size_t size, std::uint64_t seed) {
  std::vector<Block> out(count, Block(size));
  std::uint64_t ctr = 0;
  for (Block& b : out) {
    for (std::size_t i = 0; i < size; i += 8) {
      const std::uint64_t r = randmat::trial_seed(seed, ctr++);
      for (std::size_t t = 0; t < 8 && i + t < size; ++t) b[i + t] = static_cast<std::uint8_t>(r >> (8 * t));
    }
  }
  return out;
}

struct Context {
  bool json_out = false;
  std::ostream& out;
};

void emit(const Context& ctx, const json& j, const std::string& human) {
  if (ctx.json_out) {
    json full = {{"schema", kJsonSchema}};
    full.update(j);
    ctx.out << full.dump() << "\n";
  } else if (!human.empty()) {
    ctx.out << human << "\n";
  }
}

}  // namespace

std::vector<RankProbRow> rank_prob_square(std::size_t max_n, std::uint64_t trials, std::uint64_t seed) {
  const std::vector<double> analytic = randmat::monotone_check(max_n);
  std::vector<RankProbRow> rows;
  for (std::size_t n = 1; n <= max_n; ++n) {
    RankProbRow row{n, analytic[n - 1], std::nullopt, std::nullopt};
    if (trials > 0) {
      const auto mc = randmat::monte_carlo_full_rank({randmat::trial_seed(seed, n), 0.5}, n, n, trials);
      row.empirical = mc.estimate;
      row.std_error = mc.std_error;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<RankProbRow> rank_prob_tall(std::size_t n, std::size_t max_extra, std::uint64_t trials,
                                        std::uint64_t seed) {
  std::vector<RankProbRow> rows;
  for (std::size_t extra = 0; extra <= max_extra; ++extra) {
    RankProbRow row{extra, randmat::prob_tall_full_rank(n, extra), std::nullopt, std::nullopt};
    if (trials > 0) {
      const auto mc =
          randmat::monte_carlo_full_rank({randmat::trial_seed(seed, extra), 0.5}, n + extra, n, trials);
      row.empirical = mc.estimate;
      row.std_error = mc.std_error;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<BenchReport> run_bench(const BenchOptions& options) {
  options.geometry.validate();
  if (options.sizes.empty()) throw Error(Errc::invalid_argument, "no sizes given");
  if (options.repeat == 0) throw Error(Errc::invalid_argument, "repeat must be at least 1");

  const std::size_t k = options.geometry.k();
  const std::size_t n = options.geometry.n();
  const CodeSpec spec = CodeSpec::fresh(n, k, options.seed);
  const std::size_t erase = std::min(k, n - k > 10 ? n - k - 10 : std::size_t{0});

  using clock = std::chrono::steady_clock;
  std::vector<BenchReport> reports;
  for (std::size_t size : options.sizes) {
    if (size == 0) throw Error(Errc::invalid_argument, "sizes must be positive");
    const std::size_t block_size = (size + k - 1) / k;
    const std::vector<Block> data = random_blocks(k, block_size, randmat::trial_seed(options.seed, size));

    BenchReport enc{"encode", size, n, k, block_size, 0};
    Codeword word;
    double total = 0.0;
    for (std::size_t r = 0; r < options.repeat; ++r) {
      OpCounter counter;
      const auto t0 = clock::now();
      word = encode(spec, data, &counter);
      total += std::chrono::duration<double>(clock::now() - t0).count();
      enc.xor_ops = counter.xor_words;
      enc.block_xors = counter.block_xors;
    }
    enc.wall_seconds = total / static_cast<double>(options.repeat);
    enc.throughput = enc.wall_seconds > 0 ? static_cast<double>(size) / enc.wall_seconds : 0.0;
    reports.push_back(enc);

    // Redraw the erasure set until the survivors decode; the attempt number
    // is part of the seed so the choice is reproducible.
    Codeword damaged;
    for (std::uint64_t attempt = 0;; ++attempt) {
      damaged = word;
      for (std::size_t i : pick(erase, k, randmat::trial_seed(options.seed ^ size, attempt))) damaged.erase(i);
      try {
        decode(spec, damaged);
        break;
      } catch (const Error& e) {
        if (e.code() != Errc::decode_failure || attempt > 1000) throw;
      }
    }

    BenchReport dec{"decode", size, n, k, block_size, erase};
    total = 0.0;
    for (std::size_t r = 0; r < options.repeat; ++r) {
      OpCounter counter;
      const auto t0 = clock::now();
      const std::vector<Block> out = decode(spec, damaged, &counter);
      total += std::chrono::duration<double>(clock::now() - t0).count();
      if (out != data) throw Error(Errc::decode_failure, "benchmark decode mismatch");
      dec.xor_ops = counter.xor_words;
      dec.block_xors = counter.block_xors;
      dec.elimination_bit_ops = counter.elimination_bit_ops;
    }
    dec.wall_seconds = total / static_cast<double>(options.repeat);
    dec.throughput = dec.wall_seconds > 0 ? static_cast<double>(size) / dec.wall_seconds : 0.0;
    reports.push_back(dec);
  }
  return reports;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RBEC random binary code disk array tool", "rbec"};
  app.require_subcommand(1);
  bool json_out = false;
  app.add_flag("--json", json_out, "Emit machine-readable JSON");

  std::string dir;
  auto add_dir = [&dir](CLI::App* sub) { sub->add_option("--dir", dir, "Array directory")->required(); };

  std::size_t data_disks = 0;
  std::size_t parity_disks = 0;
  std::size_t depth = 0;
  std::size_t block_size = 4096;
  std::optional<std::uint64_t> seed;
  auto* init = app.add_subcommand("init", "Create an empty array");
  add_dir(init);
  init->add_option("--data", data_disks, "Data disks")->required();
  init->add_option("--parity", parity_disks, "Parity disks")->required();
  init->add_option("--depth", depth, "Blocks per disk")->required();
  init->add_option("--block-size", block_size, "Bytes per block");
  init->add_option("--seed", seed, "Generator seed (default $RBEC_SEED or 1)");

  std::string path;
  auto* put = app.add_subcommand("put", "Store a file as the array object");
  add_dir(put);
  put->add_option("--input", path, "Input file or -")->required();

  auto* get = app.add_subcommand("get", "Read the array object");
  add_dir(get);
  get->add_option("--output", path, "Output file or -")->required();

  std::uint64_t disk_id = 0;
  auto* fail = app.add_subcommand("fail", "Fail a disk and erase its strips");
  add_dir(fail);
  fail->add_option("--disk", disk_id, "Disk id")->required();
  auto* repair = app.add_subcommand("repair", "Rebuild a failed disk");
  add_dir(repair);
  repair->add_option("--disk", disk_id, "Disk id")->required();

  auto* scrub_cmd = app.add_subcommand("scrub", "Check all syndromes");
  add_dir(scrub_cmd);
  auto* info = app.add_subcommand("info", "Show code parameters and disks");
  add_dir(info);

  auto* expand = app.add_subcommand("expand", "Add or remove a disk");
  add_dir(expand);
  expand->require_subcommand(1);
  expand->fallthrough();
  auto* add_data = expand->add_subcommand("add-data", "Append a data disk and restripe");
  auto* remove_data = expand->add_subcommand("remove-data", "Remove a data disk and restripe");
  remove_data->add_option("disk", disk_id, "Disk id")->required();
  auto* add_parity = expand->add_subcommand("add-parity", "Append a parity disk");
  auto* remove_parity = expand->add_subcommand("remove-parity", "Remove a parity disk");
  remove_parity->add_option("disk", disk_id, "Disk id")->required();

  std::optional<std::size_t> max_n;
  std::vector<std::size_t> tall;
  std::uint64_t trials = 0;
  auto* rankprob = app.add_subcommand("rankprob", "Full-rank probability table as CSV");
  auto* max_n_opt = rankprob->add_option("--max-n", max_n, "Square sweep n = 1..N");
  rankprob->add_option("--tall", tall, "Tall sweep: N EXTRA")->expected(2)->excludes(max_n_opt);
  rankprob->add_option("--trials", trials, "Monte-Carlo trials per row (0 = analytic only)");
  rankprob->add_option("--seed", seed, "Base seed");

  std::vector<std::size_t> sizes;
  std::string geometry = "5:3:5";
  std::size_t repeat = 1;
  bool counts_only = false;
  auto* bench = app.add_subcommand("bench", "Encode/decode benchmark as CSV");
  bench->add_option("--sizes", sizes, "Data sizes in bytes")->required()->delimiter(',');
  bench->add_option("--geometry", geometry, "DATA:PARITY:DEPTH");
  bench->add_option("--repeat", repeat, "Timed repetitions");
  bench->add_option("--seed", seed, "Seed");
  bench->add_flag("--counts-only", counts_only, "Omit wall-time columns");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Context ctx{json_out, out};
  try {
    if (init->parsed()) {
      const auto array = store::DiskArray::init(
          dir, {data_disks, parity_disks, depth, block_size, seed.value_or(default_seed())});
      const auto meta = array.metadata();
      emit(ctx, {{"command", "init"}, {"array", summary(meta)}}, summary_line(meta));
    } else if (put->parsed()) {
      const auto bytes = read_input(path);
      store::DiskArray::open(dir).put(bytes);
      emit(ctx, {{"command", "put"}, {"length", bytes.size()}}, "stored " + std::to_string(bytes.size()) + " bytes");
    } else if (get->parsed()) {
      OpCounter counter;
      const auto bytes = store::DiskArray::open(dir).get(&counter);
      write_output(path, bytes, out);
      if (path != "-") {
        emit(ctx, {{"command", "get"}, {"length", bytes.size()}, {"xor_ops", counter.xor_words}},
             "read " + std::to_string(bytes.size()) + " bytes, " + std::to_string(counter.xor_words) +
                 " xor words");
      }
    } else if (fail->parsed()) {
      store::DiskArray::open(dir).fail_disk(disk_id);
      emit(ctx, {{"command", "fail"}, {"disk", disk_id}}, "disk " + std::to_string(disk_id) + " failed");
    } else if (repair->parsed()) {
      store::DiskArray::open(dir).repair_disk(disk_id);
      emit(ctx, {{"command", "repair"}, {"disk", disk_id}}, "disk " + std::to_string(disk_id) + " online");
    } else if (scrub_cmd->parsed()) {
      const ScrubReport report = store::DiskArray::open(dir).scrub();
      std::string human = report.consistent ? "consistent" : "inconsistent: syndromes";
      for (std::size_t i : report.fired) human += " " + std::to_string(i);
      emit(ctx, {{"command", "scrub"}, {"consistent", report.consistent}, {"fired", report.fired}}, human);
      if (!report.consistent) return kInconsistent;
    } else if (info->parsed()) {
      const auto meta = store::DiskArray::open(dir).metadata();
      json disks = json::array();
      std::string human = summary_line(meta);
      for (const auto& d : meta.disks) {
        disks.push_back({{"id", d.id},
                         {"role", store::to_string(d.role)},
                         {"status", store::to_string(d.status)},
                         {"writes", d.write_counter}});
        human += "\ndisk " + std::to_string(d.id) + " " + std::string(store::to_string(d.role)) + " " +
                 std::string(store::to_string(d.status)) + " writes=" + std::to_string(d.write_counter);
      }
      emit(ctx,
           {{"command", "info"},
            {"array", summary(meta)},
            {"block_size", meta.block_size},
            {"object_length", meta.object_length},
            {"disks", disks}},
           human);
    } else if (expand->parsed()) {
      auto array = store::DiskArray::open(dir);
      const auto before = array.metadata();
      std::string action;
      std::optional<std::uint64_t> touched;
      if (add_data->parsed()) {
        action = "add-data";
        touched = array.add_data_disk();
      } else if (remove_data->parsed()) {
        action = "remove-data";
        array.remove_data_disk(disk_id);
        touched = disk_id;
      } else if (add_parity->parsed()) {
        action = "add-parity";
        touched = array.add_parity_disk();
      } else {
        action = "remove-parity";
        array.remove_parity_disk(disk_id);
        touched = disk_id;
      }
      const auto after = array.metadata();
      emit(ctx,
           {{"command", "expand"},
            {"action", action},
            {"disk", *touched},
            {"before", summary(before)},
            {"after", summary(after)}},
           action + " disk " + std::to_string(*touched) + "\nbefore: " + summary_line(before) +
               "\nafter:  " + summary_line(after));
    } else if (rankprob->parsed()) {
      std::vector<RankProbRow> rows;
      std::string header;
      const std::uint64_t base = seed.value_or(default_seed());
      if (max_n) {
        rows = rank_prob_square(*max_n, trials, base);
        header = "n";
      } else if (tall.size() == 2) {
        rows = rank_prob_tall(tall[0], tall[1], trials, base);
        header = "extra";
      } else {
        throw Error(Errc::invalid_argument, "rankprob needs --max-n or --tall");
      }
      out << header << ",analytic,empirical,stderr\n";
      for (const auto& r : rows) {
        out << r.x << "," << fixed(r.analytic, 8) << ","
            << (r.empirical ? fixed(*r.empirical, 8) : "") << ","
            << (r.std_error ? fixed(*r.std_error, 8) : "") << "\n";
      }
    } else if (bench->parsed()) {
      BenchOptions options{sizes, parse_geometry(geometry), repeat, seed.value_or(default_seed())};
      const auto reports = run_bench(options);
      out << "operation,size_bytes,n,k,block_size,erased,xor_ops,block_xors,elimination_bit_ops";
      out << (counts_only ? "\n" : ",wall_seconds,throughput_bytes_per_s\n");
      for (const auto& r : reports) {
        out << r.operation << "," << r.size << "," << r.n << "," << r.k << "," << r.block_size << ","
            << r.erased << "," << r.xor_ops << "," << r.block_xors << "," << r.elimination_bit_ops;
        if (!counts_only) out << "," << fixed(r.wall_seconds, 9) << "," << fixed(r.throughput, 1);
        out << "\n";
      }
    }
  } catch (const Error& e) {
    if (json_out) {
      out << json{{"schema", kJsonSchema}, {"error", std::string(errc_name(e.code()))}, {"message", e.what()}}.dump() << "\n";
    }
    err << "rbec: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "rbec: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace rbec::cli
