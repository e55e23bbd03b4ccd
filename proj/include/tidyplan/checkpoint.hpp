#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tidyplan/core.hpp"

namespace tidyplan {
namespace ckpt {

// Flat little-endian checkpoint: magic + version, then named sections, each
// with explicit dimensions followed by row-major float64 data.
struct Section {
  std::vector<uint32_t> dims;
  std::vector<double> data;
};

struct Checkpoint {
  std::map<std::string, Section> sections;

  void put(const std::string& name, const std::vector<uint32_t>& dims, std::vector<double> data);
  const Section& get(const std::string& name) const;
  bool has(const std::string& name) const { return sections.count(name) > 0; }

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace ckpt
}  // namespace tidyplan
