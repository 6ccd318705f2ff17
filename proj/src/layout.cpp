#include "rbec/layout.hpp"

#include "rbec/error.hpp"

namespace rbec::layout {

void ArrayGeometry::validate() const {
  if (data_disks == 0 || parity_disks == 0 || strip_depth == 0) {
    throw Error(Errc::invalid_dimension, "geometry counts must all be at least 1");
  }
}

GridAddress element_to_grid(const ArrayGeometry& geom, std::size_t element) {
  geom.validate();
  if (element >= geom.n()) throw Error(Errc::index_out_of_range, "element index");
  // k is a whole number of strips, so parity placement continues the same
  // depth-first walk on the disks after the data disks.
  return {element / geom.strip_depth, element % geom.strip_depth};
}

std::size_t grid_to_element(const ArrayGeometry& geom, GridAddress addr) {
  geom.validate();
  if (addr.disk_index >= geom.disks() || addr.slot_index >= geom.strip_depth) {
    throw Error(Errc::index_out_of_range, "grid address");
  }
  return addr.disk_index * geom.strip_depth + addr.slot_index;
}

std::vector<std::size_t> disk_elements(const ArrayGeometry& geom, std::size_t disk_index) {
  geom.validate();
  if (disk_index >= geom.disks()) throw Error(Errc::index_out_of_range, "disk index");
  std::vector<std::size_t> out(geom.strip_depth);
  for (std::size_t s = 0; s < geom.strip_depth; ++s) out[s] = disk_index * geom.strip_depth + s;
  return out;
}

}  // namespace rbec::layout
