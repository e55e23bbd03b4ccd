#pragma once

#include <string>
#include <vector>

#include "tidyplan/gridmap.hpp"

namespace tidyplan {
namespace test {

// Rows of '.', '#', 's', 'i'; owner map stays unset.
inline GridMap map_from_ascii(const std::vector<std::string>& rows) {
  GridMap m = GridMap::blank(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      switch (rows[static_cast<size_t>(y)][static_cast<size_t>(x)]) {
        case '.': m.set({x, y}, CellTag::free_floor); break;
        case '#': m.set({x, y}, CellTag::wall); break;
        case 's': m.set({x, y}, CellTag::surface); break;
        case 'i': m.set({x, y}, CellTag::interior); break;
      }
    }
  return m;
}

inline GridMap random_map(Rng& rng, int w, int h, double wall_prob, double surface_prob = 0.0) {
  GridMap m = GridMap::blank(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double u = rng.uniform();
      if (u < wall_prob)
        m.set({x, y}, CellTag::wall);
      else if (u < wall_prob + surface_prob)
        m.set({x, y}, CellTag::surface);
    }
  return m;
}

}  // namespace test
}  // namespace tidyplan
