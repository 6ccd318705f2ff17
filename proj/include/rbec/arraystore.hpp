#pragma once

// File-backed simulated disk array holding one coded stripe.
//
// Directory layout:
//   meta.json              array metadata (schema in docs/formats.md)
//   journal.log            one line per mutating operation
//   lock                   advisory lock file
//   disk-<id>/slot-<j>.bin raw block j of disk <id>, exactly block_size bytes

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbec/code.hpp"
#include "rbec/layout.hpp"

namespace rbec::store {

enum class DiskRole { data, parity };
enum class DiskStatus { online, failed, removed };

std::string_view to_string(DiskRole role) noexcept;
std::string_view to_string(DiskStatus status) noexcept;

struct DiskRecord {
  std::uint64_t id = 0;
  DiskRole role = DiskRole::data;
  std::string path;
  DiskStatus status = DiskStatus::online;
  std::uint64_t write_counter = 0;
  // Generator column ids (data disk) or parity row ids (parity disk), one per slot.
  std::vector<std::uint64_t> element_ids;

  friend bool operator==(const DiskRecord&, const DiskRecord&) = default;
};

struct ArrayMetadata {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint32_t format_version = kFormatVersion;
  std::string derivation_function_id;
  CodeSpec code;
  layout::ArrayGeometry geometry;
  std::size_t block_size = 0;
  bool has_object = false;
  std::uint64_t object_length = 0;
  std::uint64_t next_disk_id = 0;
  std::uint64_t next_col_id = 0;
  std::uint64_t next_row_id = 0;
  std::vector<DiskRecord> disks;  // every disk ever created, in creation order

  // Registry indices of non-removed disks in grid order: data disks, then parity.
  std::vector<std::size_t> active_disks() const;
  const DiskRecord& disk(std::uint64_t id) const;
  DiskRecord& disk(std::uint64_t id);

  // Throws corrupt_metadata when code, geometry and registry disagree.
  void validate() const;

  std::string to_json() const;
  // Also regenerates the generator and checks it against the stored hex.
  static ArrayMetadata from_json(std::string_view text);

  friend bool operator==(const ArrayMetadata&, const ArrayMetadata&) = default;
};

struct ArrayConfig {
  std::size_t data_disks = 0;
  std::size_t parity_disks = 0;
  std::size_t strip_depth = 0;
  std::size_t block_size = 0;
  std::uint64_t seed = 0;
};

/// Handle on an array directory. Holds no state besides the path: every
/// operation takes the directory lock and reloads metadata from disk.
class DiskArray {
 public:
  static DiskArray init(const std::filesystem::path& dir, const ArrayConfig& config);
  static DiskArray open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  ArrayMetadata metadata() const;
  gf2::BitMatrix generator() const;

  void put(std::span<const std::uint8_t> object);
  // Reads data strips directly when every data disk is online, else decodes.
  std::vector<std::uint8_t> get(OpCounter* counter = nullptr) const;

  void fail_disk(std::uint64_t disk_id);
  void repair_disk(std::uint64_t disk_id);
  ScrubReport scrub() const;

  void remove_data_disk(std::uint64_t disk_id);
  std::uint64_t add_data_disk();
  void remove_parity_disk(std::uint64_t disk_id);
  std::uint64_t add_parity_disk();

  Block read_block(std::uint64_t disk_id, std::size_t slot) const;

 private:
  explicit DiskArray(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path dir_;
};

}  // namespace rbec::store
