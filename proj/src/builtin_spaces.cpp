#include "canary/builtin_spaces.hpp"

namespace canary {

namespace {

const std::vector<std::string> kOnsets{"B", "Br", "C", "Cr", "D", "Dr", "F", "G", "Gr", "H", "K", "L",
                                       "M", "N", "P", "Pr", "R", "S", "St", "T", "Tr", "V", "W"};
const std::vector<std::string> kVowels{"a", "e", "o"};

std::vector<std::string> roots() {
  std::vector<std::string> out;
  for (const auto& o : kOnsets)
    for (const auto& v : kVowels) out.push_back(o + v);
  return out;
}

std::vector<std::string> cross(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x + y);
  return out;
}

}  // namespace

std::vector<ValueSpaceSpec> builtin_space_specs() {
  std::vector<ValueSpaceSpec> specs;

  // 69 roots x 69 endings.
  specs.push_back({"place-name", SpaceKind::PlaceName,
                   PartsSource{{roots(),
                                cross({"l", "n", "r"},
                                      {"ford", "wick", "ton", "by", "stead", "mere", "dale", "holm", "bury", "field",
                                       "moor", "vale", "crest", "haven", "gate", "brook", "ridge", "wood", "ham",
                                       "ley", "worth", "cliff", "shaw"})},
                               ""},
                   kDefaultMinCardinality});

  specs.push_back({"given-name", SpaceKind::GivenName,
                   PartsSource{{roots(), {"lia", "nna", "ris", "lan", "dric", "mon", "vin", "ssa", "tha", "nika",
                                          "rwen", "lle", "ndo", "lix", "bel", "dan", "ren", "sha", "vo", "niel"}},
                               ""},
                   kDefaultMinCardinality});

  specs.push_back({"surname", SpaceKind::GivenName,
                   PartsSource{{roots(), {"rkowitz", "llander", "ndquist", "vanova", "sterling", "thmore", "ggins",
                                          "lverde", "rtello", "nnigan", "mberg", "ppleton", "dgewick", "rrasco",
                                          "lstrom", "nfield"}},
                               ""},
                   kDefaultMinCardinality});

  specs.push_back({"org-name", SpaceKind::OrgName,
                   PartsSource{{cross(roots(), {"xon", "zar", "quin", "vex"}),
                                {"Holdings", "Labs", "Works", "Systems", "Partners", "Group", "Studios", "Foundry",
                                 "Collective", "Dynamics", "Logistics", "Media"}},
                               " "},
                   kDefaultMinCardinality});

  specs.push_back({"title", SpaceKind::Word,
                   PartsSource{{{"Amber", "Cobalt", "Crimson", "Ivory", "Jade", "Onyx", "Scarlet", "Saffron", "Teal",
                                 "Umber", "Violet", "Azure", "Copper", "Silver", "Golden", "Russet", "Ochre", "Indigo",
                                 "Pearl", "Slate"},
                                {"Lantern", "Harbor", "Orchard", "Meadow", "Compass", "Tide", "Ember", "Falcon",
                                 "Willow", "Canyon", "Summit", "Thistle", "Heron", "Quarry", "Beacon", "Sparrow",
                                 "Cedar", "Marble", "Glacier", "Prairie", "Anvil", "Juniper", "Kestrel", "Lotus",
                                 "Mosaic", "Nimbus", "Pylon", "Raven", "Sable", "Tundra"},
                                {"Suite", "Study", "Variations"}},
                               " "},
                   kDefaultMinCardinality});

  specs.push_back({"number", SpaceKind::Number, IntegerRangeSource{100000, 999999}, kDefaultMinCardinality});
  specs.push_back({"date", SpaceKind::Date, DateRangeSource{"1950-01-01", "2023-12-31"}, kDefaultMinCardinality});
  specs.push_back({"phone", SpaceKind::Phone, DigitPatternSource{"555-XXX-XXXX"}, kDefaultMinCardinality});
  return specs;
}

}  // namespace canary
