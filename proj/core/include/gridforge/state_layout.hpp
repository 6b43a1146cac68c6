#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace gridforge {

/// Contiguous index range of one named state block inside the flat vector.
struct Slice {
  std::size_t offset = 0;
  std::size_t size = 0;
  std::size_t end() const { return offset + size; }
};

/// Maps (device id, state name) pairs onto slices of a flat state vector.
/// Slices are handed out in insertion order, so the layout is a contiguous
/// partition of [0, total_dim()).
class StateLayout {
 public:
  struct Entry {
    std::string device;
    std::string name;
    Slice slice;
  };

  /// Appends a block. Throws std::invalid_argument on a duplicate pair.
  Slice add(const std::string& device, const std::string& name, std::size_t size = 1);

  std::optional<Slice> find(const std::string& device, const std::string& name) const;
  /// Like find() but throws std::out_of_range when absent.
  Slice at(const std::string& device, const std::string& name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t total_dim() const { return total_; }

  /// Human-readable label of scalar index i, e.g. "sm1.delta" or "line4-5.i[1]".
  std::string label(std::size_t i) const;

 private:
  std::vector<Entry> entries_;
  std::size_t total_ = 0;
};

}  // namespace gridforge
