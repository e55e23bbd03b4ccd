#include "tidyplan/gridmap.hpp"

namespace tidyplan {

std::string to_string(RoomKind k) {
  switch (k) {
    case RoomKind::living: return "living";
    case RoomKind::bedroom: return "bedroom";
    case RoomKind::bathroom: return "bathroom";
    case RoomKind::kitchen: return "kitchen";
  }
  return "living";
}

RoomKind room_kind_from_string(const std::string& s) {
  if (s == "living") return RoomKind::living;
  if (s == "bedroom") return RoomKind::bedroom;
  if (s == "bathroom") return RoomKind::bathroom;
  if (s == "kitchen") return RoomKind::kitchen;
  throw PlanError(Err::io_error, "unknown room kind: " + s);
}

bool WorldState::hidden(int id) const {
  const auto& o = scenario->objects[static_cast<size_t>(id)];
  Rect box{placements[static_cast<size_t>(id)].pos, o.fw, o.fh};
  for (Cell c : box.cells()) {
    int rid = scenario->grid.owner_of(c);
    if (rid < 0) continue;
    const auto& r = scenario->receptacles[static_cast<size_t>(rid)];
    if (r.openable && !receptacle_open(rid)) return true;
  }
  return false;
}

}  // namespace tidyplan
