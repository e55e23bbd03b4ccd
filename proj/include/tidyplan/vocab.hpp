#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tidyplan/gridmap.hpp"

namespace tidyplan {
namespace vocab {

struct ReceptacleKind {
  std::string label;  // full "room|kind" label
  RoomKind room;
  int w;
  int h;
  bool openable;
};

struct ObjectKind {
  std::string label;
  int fw;
  int fh;
  // Room-receptacles where a misplaced instance plausibly turns up, with
  // prior scores in (0,1]; everything else is implausible (score 0).
  std::vector<std::pair<std::string, double>> probable;
};

const std::vector<ReceptacleKind>& receptacle_kinds();
const std::vector<ObjectKind>& object_kinds();

const ObjectKind& object_kind(const std::string& label);
const ReceptacleKind& receptacle_kind(const std::string& label);

// Prior score for (object, room-receptacle); 0 for implausible pairs.
double prior_score(const std::string& object_label, const std::string& rr_label);

}  // namespace vocab
}  // namespace tidyplan
