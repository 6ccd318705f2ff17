#pragma once

// Placement of a codeword onto a grid of disks. Disks 0..data_disks-1 hold the
// data elements, the rest hold parity; each disk stores `strip_depth`
// consecutive elements.

#include <cstddef>
#include <vector>

namespace rbec::layout {

struct ArrayGeometry {
  std::size_t data_disks = 0;
  std::size_t parity_disks = 0;
  std::size_t strip_depth = 0;

  std::size_t disks() const noexcept { return data_disks + parity_disks; }
  std::size_t k() const noexcept { return data_disks * strip_depth; }
  std::size_t n() const noexcept { return disks() * strip_depth; }
  void validate() const;  // all counts >= 1

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

struct GridAddress {
  std::size_t disk_index = 0;
  std::size_t slot_index = 0;
  friend bool operator==(const GridAddress&, const GridAddress&) = default;
};

GridAddress element_to_grid(const ArrayGeometry& geom, std::size_t element);
std::size_t grid_to_element(const ArrayGeometry& geom, GridAddress addr);
std::vector<std::size_t> disk_elements(const ArrayGeometry& geom, std::size_t disk_index);

}  // namespace rbec::layout
