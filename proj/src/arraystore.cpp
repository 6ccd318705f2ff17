#include "rbec/arraystore.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

#include "rbec/randmat.hpp"

namespace rbec::store {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kJournalFile = "journal.log";
constexpr const char* kLockFile = "lock";

class DirLock {
 public:
  DirLock(const fs::path& dir, bool exclusive) {
    fd_ = ::open((dir / kLockFile).c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(Errc::io_error, "cannot open lock file in " + dir.string());
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      throw Error(Errc::io_error, "cannot lock " + dir.string());
    }
  }
  ~DirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void fsync_path(const fs::path& path, int flags) {
  const int fd = ::open(path.c_str(), flags | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

ArrayMetadata load_meta(const fs::path& dir) {
  if (!fs::exists(dir / kMetaFile)) throw Error(Errc::io_error, dir.string() + " is not an array");
  return ArrayMetadata::from_json(read_text(dir / kMetaFile));
}

// Write-new-then-rename so a crash leaves either the old or the new file.
void save_meta(const fs::path& dir, const ArrayMetadata& meta) {
  meta.validate();
  const std::string text = meta.to_json();
  const fs::path tmp = dir / (std::string(kMetaFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
  }
  fsync_path(tmp, O_RDONLY);
  std::error_code ec;
  fs::rename(tmp, dir / kMetaFile, ec);
  if (ec) throw Error(Errc::io_error, "cannot replace metadata: " + ec.message());
  fsync_path(dir, O_RDONLY | O_DIRECTORY);
}

void journal(const fs::path& dir, std::string_view op, const std::string& params) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::ofstream out(dir / kJournalFile, std::ios::app);
  out << stamp << '\t' << op << '\t' << params << '\n';
  if (!out) throw Error(Errc::io_error, "cannot append to journal");
}

fs::path slot_path(const fs::path& dir, const DiskRecord& disk, std::size_t slot) {
  return dir / disk.path / ("slot-" + std::to_string(slot) + ".bin");
}

void write_block(const fs::path& dir, DiskRecord& disk, std::size_t slot, const Block& block) {
  const fs::path path = slot_path(dir, disk, slot);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(block.data()), static_cast<std::streamsize>(block.size()));
  out.flush();
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  ++disk.write_counter;
}

Block read_block_file(const fs::path& dir, const DiskRecord& disk, std::size_t slot, std::size_t size) {
  const fs::path path = slot_path(dir, disk, slot);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  Block block(size);
  in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(size));
  if (in.gcount() != static_cast<std::streamsize>(size) || in.peek() != std::char_traits<char>::eof()) {
    throw Error(Errc::io_error, path.string() + " is not exactly one block");
  }
  return block;
}

void clear_disk(const fs::path& dir, const DiskRecord& disk) {
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir / disk.path, ec)) fs::remove(entry.path(), ec);
  if (ec) throw Error(Errc::io_error, "cannot clear " + disk.path + ": " + ec.message());
}

// Recomputes code ids and geometry from the active part of the registry.
void rebuild_code(ArrayMetadata& meta) {
  const std::size_t depth = meta.geometry.strip_depth;
  meta.code.data_col_ids.clear();
  meta.code.parity_row_ids.clear();
  std::size_t data_disks = 0;
  std::size_t parity_disks = 0;
  for (std::size_t idx : meta.active_disks()) {
    const DiskRecord& d = meta.disks[idx];
    auto& ids = d.role == DiskRole::data ? meta.code.data_col_ids : meta.code.parity_row_ids;
    ids.insert(ids.end(), d.element_ids.begin(), d.element_ids.end());
    ++(d.role == DiskRole::data ? data_disks : parity_disks);
  }
  meta.geometry = {data_disks, parity_disks, depth};
  meta.code.k = meta.geometry.k();
  meta.code.n = meta.geometry.n();
}

Codeword gather(const fs::path& dir, const ArrayMetadata& meta) {
  Codeword word;
  word.block_size = meta.block_size;
  for (std::size_t idx : meta.active_disks()) {
    const DiskRecord& d = meta.disks[idx];
    for (std::size_t s = 0; s < meta.geometry.strip_depth; ++s) {
      if (d.status == DiskStatus::online) {
        word.blocks.push_back(read_block_file(dir, d, s, meta.block_size));
        word.present.push_back(true);
      } else {
        word.blocks.emplace_back();
        word.present.push_back(false);
      }
    }
  }
  return word;
}

std::vector<Block> read_data(const fs::path& dir, const ArrayMetadata& meta, OpCounter* counter) {
  if (!meta.has_object) throw Error(Errc::no_object, "array holds no object");
  const auto active = meta.active_disks();
  const bool direct = std::all_of(active.begin(), active.end(), [&](std::size_t idx) {
    const DiskRecord& d = meta.disks[idx];
    return d.role != DiskRole::data || d.status == DiskStatus::online;
  });
  if (direct) {
    std::vector<Block> data;
    for (std::size_t idx : active) {
      const DiskRecord& d = meta.disks[idx];
      if (d.role != DiskRole::data) continue;
      for (std::size_t s = 0; s < meta.geometry.strip_depth; ++s) {
        data.push_back(read_block_file(dir, d, s, meta.block_size));
      }
    }
    return data;
  }
  const Codeword word = gather(dir, meta);
  try {
    return decode(meta.code, word, counter);
  } catch (const Error& e) {
    if (e.code() == Errc::decode_failure || e.code() == Errc::insufficient_blocks) {
      throw Error(Errc::unrecoverable, e.what());
    }
    throw;
  }
}

std::vector<std::uint8_t> join(const std::vector<Block>& data, std::uint64_t length) {
  std::vector<std::uint8_t> out;
  for (const Block& b : data) out.insert(out.end(), b.begin(), b.end());
  out.resize(length);
  return out;
}

std::vector<Block> split(std::span<const std::uint8_t> object, std::size_t k, std::size_t block_size) {
  std::vector<Block> blocks(k, Block(block_size, 0));
  for (std::size_t i = 0; i < object.size(); ++i) blocks[i / block_size][i % block_size] = object[i];
  return blocks;
}

// Writes every block of `word` that lands on an online disk.
void write_word(const fs::path& dir, ArrayMetadata& meta, const Codeword& word) {
  const auto active = meta.active_disks();
  for (std::size_t pos = 0; pos < active.size(); ++pos) {
    DiskRecord& d = meta.disks[active[pos]];
    if (d.status != DiskStatus::online) continue;
    for (std::size_t s = 0; s < meta.geometry.strip_depth; ++s) {
      write_block(dir, d, s, word.blocks[layout::grid_to_element(meta.geometry, {pos, s})]);
    }
  }
}

void check_fits(const ArrayMetadata& meta, std::uint64_t length) {
  if (length > meta.code.k * meta.block_size) {
    throw Error(Errc::object_too_large, std::to_string(length) + " bytes exceed capacity " +
                                            std::to_string(meta.code.k * meta.block_size));
  }
}

DiskRecord& active_disk(ArrayMetadata& meta, std::uint64_t id) {
  DiskRecord& d = meta.disk(id);
  if (d.status == DiskStatus::removed) throw Error(Errc::unknown_disk, "disk " + std::to_string(id) + " was removed");
  return d;
}

std::size_t count_active(const ArrayMetadata& meta, DiskRole role) {
  const auto active = meta.active_disks();
  return static_cast<std::size_t>(std::count_if(active.begin(), active.end(), [&](std::size_t idx) {
    return meta.disks[idx].role == role;
  }));
}

DiskRecord& append_disk(const fs::path& dir, ArrayMetadata& meta, DiskRole role) {
  DiskRecord d;
  d.id = meta.next_disk_id++;
  d.role = role;
  d.path = "disk-" + std::to_string(d.id);
  std::uint64_t& next = role == DiskRole::data ? meta.next_col_id : meta.next_row_id;
  for (std::size_t s = 0; s < meta.geometry.strip_depth; ++s) d.element_ids.push_back(next++);
  std::error_code ec;
  fs::create_directories(dir / d.path, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + d.path + ": " + ec.message());
  meta.disks.push_back(std::move(d));
  return meta.disks.back();
}

void retire_disk(const fs::path& dir, DiskRecord& disk) {
  disk.status = DiskStatus::removed;
  std::error_code ec;
  fs::remove_all(dir / disk.path, ec);
  if (ec) throw Error(Errc::io_error, "cannot remove " + disk.path + ": " + ec.message());
}

void restripe(const fs::path& dir, ArrayMetadata& meta, const std::vector<std::uint8_t>& object) {
  check_fits(meta, object.size());
  write_word(dir, meta, encode(meta.code, split(object, meta.code.k, meta.block_size)));
}

DiskRole parse_role(const std::string& s) {
  if (s == "data") return DiskRole::data;
  if (s == "parity") return DiskRole::parity;
  throw Error(Errc::corrupt_metadata, "unknown disk role '" + s + "'");
}

DiskStatus parse_status(const std::string& s) {
  if (s == "online") return DiskStatus::online;
  if (s == "failed") return DiskStatus::failed;
  if (s == "removed") return DiskStatus::removed;
  throw Error(Errc::corrupt_metadata, "unknown disk status '" + s + "'");
}

}  // namespace

std::string_view to_string(DiskRole role) noexcept {
  return role == DiskRole::data ? "data" : "parity";
}

std::string_view to_string(DiskStatus status) noexcept {
  switch (status) {
    case DiskStatus::online: return "online";
    case DiskStatus::failed: return "failed";
    case DiskStatus::removed: return "removed";
  }
  return "unknown";
}

std::vector<std::size_t> ArrayMetadata::active_disks() const {
  std::vector<std::size_t> out;
  for (DiskRole role : {DiskRole::data, DiskRole::parity}) {
    for (std::size_t i = 0; i < disks.size(); ++i) {
      if (disks[i].role == role && disks[i].status != DiskStatus::removed) out.push_back(i);
    }
  }
  return out;
}

const DiskRecord& ArrayMetadata::disk(std::uint64_t id) const {
  for (const DiskRecord& d : disks) {
    if (d.id == id) return d;
  }
  throw Error(Errc::unknown_disk, "no disk with id " + std::to_string(id));
}

DiskRecord& ArrayMetadata::disk(std::uint64_t id) {
  return const_cast<DiskRecord&>(static_cast<const ArrayMetadata&>(*this).disk(id));
}

void ArrayMetadata::validate() const {
  auto fail = [](const std::string& why) { throw Error(Errc::corrupt_metadata, why); };
  if (format_version != kFormatVersion) fail("unsupported format version");
  if (derivation_function_id != randmat::kDerivationId) {
    fail("unknown derivation function '" + derivation_function_id + "'");
  }
  try {
    code.validate();
    geometry.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (block_size == 0) fail("block_size must be positive");
  if (code.k != geometry.k() || code.n != geometry.n()) fail("code and geometry disagree");
  if (object_length > code.k * block_size) fail("object_length exceeds capacity");
  if (!has_object && object_length != 0) fail("object_length without object");

  std::vector<std::uint64_t> cols;
  std::vector<std::uint64_t> rows;
  std::size_t data_disks = 0;
  std::size_t parity_disks = 0;
  for (std::size_t idx : active_disks()) {
    const DiskRecord& d = disks[idx];
    if (d.element_ids.size() != geometry.strip_depth) fail("disk " + std::to_string(d.id) + " has wrong id count");
    auto& ids = d.role == DiskRole::data ? cols : rows;
    ids.insert(ids.end(), d.element_ids.begin(), d.element_ids.end());
    ++(d.role == DiskRole::data ? data_disks : parity_disks);
  }
  if (data_disks != geometry.data_disks || parity_disks != geometry.parity_disks) {
    fail("registry disk counts disagree with geometry");
  }
  if (cols != code.data_col_ids || rows != code.parity_row_ids) fail("registry ids disagree with code");
  for (std::size_t i = 0; i < disks.size(); ++i) {
    const DiskRecord& d = disks[i];
    if (d.id >= next_disk_id) fail("disk id beyond allocator");
    for (std::size_t j = 0; j < i; ++j) {
      if (disks[j].id == d.id) fail("duplicate disk id");
    }
    const std::uint64_t bound = d.role == DiskRole::data ? next_col_id : next_row_id;
    for (std::uint64_t id : d.element_ids) {
      if (id >= bound) fail("element id beyond allocator");
    }
  }
}

std::string ArrayMetadata::to_json() const {
  json disks_json = json::array();
  for (const DiskRecord& d : disks) {
    disks_json.push_back({{"id", d.id},
                          {"role", to_string(d.role)},
                          {"path", d.path},
                          {"status", to_string(d.status)},
                          {"writes", d.write_counter},
                          {"ids", d.element_ids}});
  }
  const gf2::BitMatrix g = build_generator(code);
  json j = {
      {"format_version", format_version},
      {"derivation_function", derivation_function_id},
      {"code",
       {{"version", code.version},
        {"n", code.n},
        {"k", code.k},
        {"seed", code.seed},
        {"data_col_ids", code.data_col_ids},
        {"parity_row_ids", code.parity_row_ids}}},
      {"geometry",
       {{"data_disks", geometry.data_disks},
        {"parity_disks", geometry.parity_disks},
        {"strip_depth", geometry.strip_depth}}},
      {"block_size", block_size},
      {"object", {{"present", has_object}, {"length", object_length}}},
      {"next_ids", {{"disk", next_disk_id}, {"col", next_col_id}, {"row", next_row_id}}},
      {"disks", disks_json},
      {"generator", {{"rows", g.rows()}, {"cols", g.cols()}, {"hex", gf2::to_hex(g)}}},
  };
  return j.dump(2) + "\n";
}

ArrayMetadata ArrayMetadata::from_json(std::string_view text) {
  ArrayMetadata m;
  std::string stored_hex;
  try {
    const json j = json::parse(text);
    m.format_version = j.at("format_version").get<std::uint32_t>();
    m.derivation_function_id = j.at("derivation_function").get<std::string>();
    const json& c = j.at("code");
    m.code.version = c.at("version").get<std::uint32_t>();
    m.code.n = c.at("n").get<std::size_t>();
    m.code.k = c.at("k").get<std::size_t>();
    m.code.seed = c.at("seed").get<std::uint64_t>();
    m.code.data_col_ids = c.at("data_col_ids").get<std::vector<std::uint64_t>>();
    m.code.parity_row_ids = c.at("parity_row_ids").get<std::vector<std::uint64_t>>();
    const json& g = j.at("geometry");
    m.geometry.data_disks = g.at("data_disks").get<std::size_t>();
    m.geometry.parity_disks = g.at("parity_disks").get<std::size_t>();
    m.geometry.strip_depth = g.at("strip_depth").get<std::size_t>();
    m.block_size = j.at("block_size").get<std::size_t>();
    m.has_object = j.at("object").at("present").get<bool>();
    m.object_length = j.at("object").at("length").get<std::uint64_t>();
    m.next_disk_id = j.at("next_ids").at("disk").get<std::uint64_t>();
    m.next_col_id = j.at("next_ids").at("col").get<std::uint64_t>();
    m.next_row_id = j.at("next_ids").at("row").get<std::uint64_t>();
    for (const json& d : j.at("disks")) {
      DiskRecord r;
      r.id = d.at("id").get<std::uint64_t>();
      r.role = parse_role(d.at("role").get<std::string>());
      r.path = d.at("path").get<std::string>();
      r.status = parse_status(d.at("status").get<std::string>());
      r.write_counter = d.at("writes").get<std::uint64_t>();
      r.element_ids = d.at("ids").get<std::vector<std::uint64_t>>();
      m.disks.push_back(std::move(r));
    }
    stored_hex = j.at("generator").at("hex").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_metadata, e.what());
  }
  m.validate();
  if (gf2::to_hex(build_generator(m.code)) != stored_hex) {
    throw Error(Errc::corrupt_metadata, "regenerated generator does not match stored generator");
  }
  return m;
}

DiskArray DiskArray::init(const fs::path& dir, const ArrayConfig& config) {
  layout::ArrayGeometry geom{config.data_disks, config.parity_disks, config.strip_depth};
  geom.validate();
  if (config.block_size == 0) throw Error(Errc::invalid_dimension, "block_size must be positive");

  std::error_code ec;
  if (fs::exists(dir, ec) && !fs::is_empty(dir, ec)) {
    throw Error(Errc::directory_not_empty, dir.string());
  }
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());

  DirLock lock(dir, true);
  ArrayMetadata meta;
  meta.derivation_function_id = std::string(randmat::kDerivationId);
  meta.code.seed = config.seed;
  meta.geometry = geom;
  meta.block_size = config.block_size;
  for (std::size_t d = 0; d < geom.data_disks; ++d) append_disk(dir, meta, DiskRole::data);
  for (std::size_t d = 0; d < geom.parity_disks; ++d) append_disk(dir, meta, DiskRole::parity);
  rebuild_code(meta);
  save_meta(dir, meta);

  std::ostringstream params;
  params << "data=" << config.data_disks << " parity=" << config.parity_disks
         << " depth=" << config.strip_depth << " block_size=" << config.block_size
         << " seed=" << config.seed;
  journal(dir, "init", params.str());
  return DiskArray(dir);
}

DiskArray DiskArray::open(const fs::path& dir) {
  DiskArray array(dir);
  DirLock lock(dir, false);
  load_meta(dir);
  return array;
}

ArrayMetadata DiskArray::metadata() const {
  DirLock lock(dir_, false);
  return load_meta(dir_);
}

gf2::BitMatrix DiskArray::generator() const { return build_generator(metadata().code); }

void DiskArray::put(std::span<const std::uint8_t> object) {
  DirLock lock(dir_, true);
  ArrayMetadata meta = load_meta(dir_);
  check_fits(meta, object.size());
  write_word(dir_, meta, encode(meta.code, split(object, meta.code.k, meta.block_size)));
  meta.has_object = true;
  meta.object_length = object.size();
  save_meta(dir_, meta);
  journal(dir_, "put", "length=" + std::to_string(object.size()));
}

std::vector<std::uint8_t> DiskArray::get(OpCounter* counter) const {
  DirLock lock(dir_, false);
  const ArrayMetadata meta = load_meta(dir_);
  return join(read_data(dir_, meta, counter), meta.object_length);
}

void DiskArray::fail_disk(std::uint64_t disk_id) {
  DirLock lock(dir_, true);
  ArrayMetadata meta = load_meta(dir_);
  DiskRecord& d = active_disk(meta, disk_id);
  if (d.status == DiskStatus::failed) return;
  clear_disk(dir_, d);
  d.status = DiskStatus::failed;
  save_meta(dir_, meta);
  journal(dir_, "fail", "disk=" + std::to_string(disk_id));
}

void DiskArray::repair_disk(std::uint64_t disk_id) {
  DirLock lock(dir_, true);
  ArrayMetadata meta = load_meta(dir_);
  DiskRecord& d = active_disk(meta, disk_id);
  if (d.status == DiskStatus::online) return;

  if (meta.has_object) {
    const std::vector<Block> data = read_data(dir_, meta, nullptr);
    if (d.role == DiskRole::data) {
      const auto pos = std::find(meta.code.data_col_ids.begin(), meta.code.data_col_ids.end(),
                                 d.element_ids.front()) -
                       meta.code.data_col_ids.begin();
      for (std::size_t s = 0; s < d.element_ids.size(); ++s) {
        write_block(dir_, d, s, data[static_cast<std::size_t>(pos) + s]);
      }
    } else {
      CodeSpec own = meta.code;
      own.parity_row_ids = d.element_ids;
      own.n = own.k + own.parity_row_ids.size();
      const std::vector<Block> parity = encode_parity(own, data);
      for (std::size_t s = 0; s < parity.size(); ++s) write_block(dir_, d, s, parity[s]);
    }
  }
  d.status = DiskStatus::online;
  save_meta(dir_, meta);
  journal(dir_, "repair", "disk=" + std::to_string(disk_id));
}

ScrubReport DiskArray::scrub() const {
  DirLock lock(dir_, false);
  const ArrayMetadata meta = load_meta(dir_);
  if (!meta.has_object) throw Error(Errc::no_object, "array holds no object");
  return rbec::scrub(meta.code, gather(dir_, meta));
}

void DiskArray::remove_data_disk(std::uint64_t disk_id) {
  DirLock lock(dir_, true);
  ArrayMetadata meta = load_meta(dir_);
  DiskRecord& d = active_disk(meta, disk_id);
  if (d.role != DiskRole::data) throw Error(Errc::refused, "disk " + std::to_string(disk_id) + " is not a data disk");
  if (count_active(meta, DiskRole::data) < 2) throw Error(Errc::refused, "cannot remove the last data disk");

  std::optional<std::vector<std::uint8_t>> object;
  if (meta.has_object) {
    object = join(read_data(dir_, meta, nullptr), meta.object_length);
    const std::size_t shrunk = (meta.code.k - meta.geometry.strip_depth) * meta.block_size;
    if (object->size() > shrunk) {
      throw Error(Errc::object_too_large, "object does not fit after removing disk " + std::to_string(disk_id));
    }
  }
  retire_disk(dir_, d);
  rebuild_code(meta);
  if (object) restripe(dir_, meta, *object);
  save_meta(dir_, meta);
  journal(dir_, "remove-data", "disk=" + std::to_string(disk_id));
}

std::uint64_t DiskArray::add_data_disk() {
  DirLock lock(dir_, true);
  ArrayMetadata meta = load_meta(dir_);
  std::optional<std::vector<std::uint8_t>> object;
  if (meta.has_object) object = join(read_data(dir_, meta, nullptr), meta.object_length);

  const std::uint64_t id = append_disk(dir_, meta, DiskRole::data).id;
  rebuild_code(meta);
  if (object) restripe(dir_, meta, *object);
  save_meta(dir_, meta);
  journal(dir_, "add-data", "disk=" + std::to_string(id));
  return id;
}

void DiskArray::remove_parity_disk(std::uint64_t disk_id) {
  DirLock lock(dir_, true);
  ArrayMetadata meta = load_meta(dir_);
  DiskRecord& d = active_disk(meta, disk_id);
  if (d.role != DiskRole::parity) throw Error(Errc::refused, "disk " + std::to_string(disk_id) + " is not a parity disk");
  if (count_active(meta, DiskRole::parity) < 2) throw Error(Errc::refused, "cannot remove the last parity disk");

  // Surviving parity rows keep their ids, so no block anywhere changes.
  retire_disk(dir_, d);
  rebuild_code(meta);
  save_meta(dir_, meta);
  journal(dir_, "remove-parity", "disk=" + std::to_string(disk_id));
}

std::uint64_t DiskArray::add_parity_disk() {
  DirLock lock(dir_, true);
  ArrayMetadata meta = load_meta(dir_);
  std::optional<std::vector<Block>> data;
  if (meta.has_object) data = read_data(dir_, meta, nullptr);

  DiskRecord& d = append_disk(dir_, meta, DiskRole::parity);
  const std::uint64_t id = d.id;
  if (data) {
    CodeSpec own = meta.code;
    own.parity_row_ids = d.element_ids;
    own.n = own.k + own.parity_row_ids.size();
    const std::vector<Block> parity = encode_parity(own, *data);
    for (std::size_t s = 0; s < parity.size(); ++s) write_block(dir_, d, s, parity[s]);
  }
  rebuild_code(meta);
  save_meta(dir_, meta);
  journal(dir_, "add-parity", "disk=" + std::to_string(id));
  return id;
}

Block DiskArray::read_block(std::uint64_t disk_id, std::size_t slot) const {
  DirLock lock(dir_, false);
  const ArrayMetadata meta = load_meta(dir_);
  const DiskRecord& d = meta.disk(disk_id);
  if (d.status != DiskStatus::online) throw Error(Errc::unrecoverable, "disk " + std::to_string(disk_id) + " is not online");
  if (slot >= meta.geometry.strip_depth) throw Error(Errc::index_out_of_range, "slot");
  return read_block_file(dir_, d, slot, meta.block_size);
}

}  // namespace rbec::store
