#include "tidyplan/vocab.hpp"

#include <map>

#include "tidyplan/embedding.hpp"

namespace tidyplan {
namespace vocab {

const std::vector<ReceptacleKind>& receptacle_kinds() {
  static const std::vector<ReceptacleKind> kinds = {
      {"kitchen|fridge", RoomKind::kitchen, 2, 2, true},
      {"kitchen|counter", RoomKind::kitchen, 4, 2, false},
      {"kitchen|cabinet", RoomKind::kitchen, 3, 2, true},
      {"kitchen|sink", RoomKind::kitchen, 2, 2, false},
      {"living|sofa", RoomKind::living, 4, 2, false},
      {"living|table", RoomKind::living, 3, 2, false},
      {"living|shelf", RoomKind::living, 2, 3, false},
      {"living|cabinet", RoomKind::living, 2, 2, true},
      {"bedroom|bed", RoomKind::bedroom, 4, 3, false},
      {"bedroom|dresser", RoomKind::bedroom, 3, 2, true},
      {"bedroom|nightstand", RoomKind::bedroom, 2, 2, false},
      {"bedroom|chair", RoomKind::bedroom, 2, 2, false},
      {"bathroom|sink", RoomKind::bathroom, 2, 2, false},
      {"bathroom|cabinet", RoomKind::bathroom, 2, 2, true},
      {"bathroom|shelf", RoomKind::bathroom, 2, 2, false},
      {"bathroom|basket", RoomKind::bathroom, 2, 2, false},
  };
  return kinds;
}

namespace {

// Misplacement prior: a per-receptacle base rate plus a small deterministic
// per-pair offset. Within a room the bases sit two offsets apart, so the
// in-room ordering is stable.
double receptacle_base(const std::string& rr) {
  static const std::map<std::string, double> base = {
      {"kitchen|fridge", 0.90},  {"kitchen|counter", 0.70},    {"kitchen|cabinet", 0.55},
      {"kitchen|sink", 0.40},    {"living|table", 0.75},       {"living|sofa", 0.65},
      {"living|shelf", 0.55},    {"living|cabinet", 0.40},     {"bedroom|bed", 0.70},
      {"bedroom|nightstand", 0.60}, {"bedroom|dresser", 0.50}, {"bedroom|chair", 0.40},
      {"bathroom|sink", 0.70},   {"bathroom|cabinet", 0.60},   {"bathroom|shelf", 0.50},
      {"bathroom|basket", 0.40},
  };
  return base.at(rr);
}

double pair_score_value(const std::string& object_label, const std::string& rr_label) {
  uint64_t h = embed::fnv1a(object_label + "|" + rr_label);
  double tweak = (static_cast<double>(h % 3) - 1.0) * 0.04;
  return receptacle_base(rr_label) + tweak;
}

struct ObjectSpec {
  const char* label;
  int fw;
  int fh;
  std::vector<const char*> probable;
};

// Probable sets are room-complete: an object misplaced in one of its rooms
// can turn up on any receptacle there. Scores then rank receptacles within
// the room.
const std::vector<ObjectSpec>& object_specs() {
  static const std::vector<const char*> kKitchen = {"kitchen|fridge", "kitchen|counter",
                                                    "kitchen|cabinet", "kitchen|sink"};
  static const std::vector<const char*> kLiving = {"living|table", "living|sofa", "living|shelf",
                                                   "living|cabinet"};
  static const std::vector<const char*> kBedroom = {"bedroom|bed", "bedroom|nightstand",
                                                    "bedroom|dresser", "bedroom|chair"};
  static const std::vector<const char*> kBathroom = {"bathroom|sink", "bathroom|cabinet",
                                                     "bathroom|shelf", "bathroom|basket"};
  auto rooms = [](std::initializer_list<const std::vector<const char*>*> lists) {
    std::vector<const char*> out;
    for (const auto* l : lists) out.insert(out.end(), l->begin(), l->end());
    return out;
  };
  static const std::vector<ObjectSpec> specs = {
      {"apple", 1, 1, rooms({&kKitchen})},
      {"banana", 1, 1, rooms({&kKitchen})},
      {"milk", 2, 1, rooms({&kKitchen})},
      {"cheese", 2, 1, rooms({&kKitchen})},
      {"juice", 2, 1, rooms({&kKitchen})},
      {"egg", 1, 1, rooms({&kKitchen})},
      {"lettuce", 2, 1, rooms({&kKitchen})},
      {"tomato", 1, 1, rooms({&kKitchen})},
      {"bread", 2, 1, rooms({&kKitchen})},
      {"cereal", 2, 1, rooms({&kKitchen})},
      {"pasta", 2, 1, rooms({&kKitchen})},
      {"kettle", 2, 1, rooms({&kKitchen})},
      {"pan", 2, 1, rooms({&kKitchen})},
      {"bowl", 2, 1, rooms({&kKitchen})},
      {"plate", 2, 1, rooms({&kKitchen})},
      {"cup", 1, 1, rooms({&kKitchen})},
      {"mug", 1, 1, rooms({&kKitchen, &kLiving})},
      {"fork", 1, 1, rooms({&kKitchen})},
      {"jug", 2, 1, rooms({&kKitchen})},
      {"sponge", 1, 1, rooms({&kKitchen, &kBathroom})},
      {"soap", 1, 1, rooms({&kBathroom})},
      {"toothbrush", 1, 1, rooms({&kBathroom})},
      {"shampoo", 2, 1, rooms({&kBathroom})},
      {"razor", 1, 1, rooms({&kBathroom})},
      {"hairbrush", 1, 1, rooms({&kBathroom})},
      {"perfume", 1, 1, rooms({&kBathroom})},
      {"towel", 2, 1, rooms({&kBathroom, &kBedroom})},
      {"toilet_paper", 2, 1, rooms({&kBathroom})},
      {"pillow", 2, 2, rooms({&kBedroom})},
      {"blanket", 2, 2, rooms({&kBedroom, &kLiving})},
      {"socks", 1, 1, rooms({&kBedroom})},
      {"alarm_clock", 1, 1, rooms({&kBedroom})},
      {"lamp", 2, 1, rooms({&kBedroom, &kLiving})},
      {"book", 2, 1, rooms({&kLiving})},
      {"magazine", 2, 1, rooms({&kLiving})},
      {"remote", 1, 1, rooms({&kLiving})},
      {"laptop", 2, 1, rooms({&kLiving, &kBedroom})},
      {"vase", 2, 1, rooms({&kLiving})},
      {"candle", 1, 1, rooms({&kLiving})},
      {"plant", 2, 1, rooms({&kLiving})},
  };
  return specs;
}

}  // namespace

const std::vector<ObjectKind>& object_kinds() {
  static const std::vector<ObjectKind> kinds = [] {
    std::vector<ObjectKind> out;
    for (const auto& spec : object_specs()) {
      ObjectKind k;
      k.label = spec.label;
      k.fw = spec.fw;
      k.fh = spec.fh;
      for (const char* rr : spec.probable) k.probable.push_back({rr, pair_score_value(spec.label, rr)});
      out.push_back(std::move(k));
    }
    return out;
  }();
  return kinds;
}

const ObjectKind& object_kind(const std::string& label) {
  for (const auto& k : object_kinds())
    if (k.label == label) return k;
  throw PlanError(Err::degenerate_input, "unknown object label: " + label);
}

const ReceptacleKind& receptacle_kind(const std::string& label) {
  for (const auto& k : receptacle_kinds())
    if (k.label == label) return k;
  throw PlanError(Err::degenerate_input, "unknown receptacle label: " + label);
}

double prior_score(const std::string& object_label, const std::string& rr_label) {
  static const std::map<std::pair<std::string, std::string>, double> table = [] {
    std::map<std::pair<std::string, std::string>, double> t;
    for (const auto& o : object_kinds())
      for (const auto& [rr, s] : o.probable) t[{o.label, rr}] = s;
    return t;
  }();
  auto it = table.find({object_label, rr_label});
  return it == table.end() ? 0.0 : it->second;
}

}  // namespace vocab
}  // namespace tidyplan
