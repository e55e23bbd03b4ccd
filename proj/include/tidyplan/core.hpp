#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tidyplan {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Axis-aligned rectangle of cells; origin is the min corner, w/h in cells.
struct Rect {
  Cell origin;
  int w = 1;
  int h = 1;

  bool contains(Cell c) const {
    return c.x >= origin.x && c.x < origin.x + w && c.y >= origin.y && c.y < origin.y + h;
  }
  bool intersects(const Rect& o) const {
    return origin.x < o.origin.x + o.w && o.origin.x < origin.x + w &&
           origin.y < o.origin.y + o.h && o.origin.y < origin.y + h;
  }
  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    out.reserve(static_cast<size_t>(w) * h);
    for (int dy = 0; dy < h; ++dy)
      for (int dx = 0; dx < w; ++dx) out.push_back({origin.x + dx, origin.y + dy});
    return out;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class Err {
  capacity_exceeded,
  infeasible_swap,
  degenerate_input,
  unreachable_object,
  dest_occupied,
  not_openable,
  not_adjacent,
  empty_label,
  length_mismatch,
  degenerate_table,
  shape_mismatch,
  missing_cache,
  no_feasible_cell,
  buffer_underfull,
  empty_valid_set,
  missing_model,
  io_error,
};

class PlanError : public std::runtime_error {
 public:
  PlanError(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

// Deterministic RNG with fixed-algorithm draws so results do not depend on
// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : root_(seed) {
    state_ = splitmix(seed + 0x9e3779b97f4a7c15ull);
    state2_ = splitmix(state_);
  }

  uint64_t next_u64() {
    // xorshift128+
    uint64_t s1 = state_;
    const uint64_t s0 = state2_;
    state_ = s0;
    s1 ^= s1 << 23;
    state2_ = s1 ^ s0 ^ (s1 >> 18) ^ (s0 >> 5);
    return state2_ + s0;
  }

  // Uniform in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw PlanError(Err::degenerate_input, "uniform_int: empty range");
    uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + static_cast<int>(v % span);
  }

  size_t index(size_t n) {
    if (n == 0) throw PlanError(Err::degenerate_input, "index: empty range");
    return static_cast<size_t>(uniform_int(0, static_cast<int>(n) - 1));
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double gaussian(double mean, double stddev);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  // Independent child stream; deterministic in (root seed, tag).
  Rng fork(uint64_t tag) const { return Rng(splitmix(root_ ^ splitmix(tag + 0x6a09e667f3bcc909ull))); }

  uint64_t root_seed() const { return root_; }

  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  uint64_t root_;
  uint64_t state_;
  uint64_t state2_;
};

}  // namespace tidyplan
