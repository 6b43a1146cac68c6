#include "gridforge/state_layout.hpp"

#include <stdexcept>

namespace gridforge {

Slice StateLayout::add(const std::string& device, const std::string& name, std::size_t size) {
  if (find(device, name)) {
    throw std::invalid_argument("duplicate state '" + device + "." + name + "'");
  }
  Slice s{total_, size};
  entries_.push_back({device, name, s});
  total_ += size;
  return s;
}

std::optional<Slice> StateLayout::find(const std::string& device, const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.device == device && e.name == name) return e.slice;
  }
  return std::nullopt;
}

Slice StateLayout::at(const std::string& device, const std::string& name) const {
  if (auto s = find(device, name)) return *s;
  throw std::out_of_range("no state '" + device + "." + name + "'");
}

std::string StateLayout::label(std::size_t i) const {
  for (const auto& e : entries_) {
    if (i >= e.slice.offset && i < e.slice.end()) {
      std::string out = e.device + "." + e.name;
      if (e.slice.size > 1) out += "[" + std::to_string(i - e.slice.offset) + "]";
      return out;
    }
  }
  return "?" + std::to_string(i);
}

}  // namespace gridforge
