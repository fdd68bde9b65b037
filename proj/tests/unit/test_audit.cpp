#include "doctest.h"

#include <algorithm>

#include "canary/audit.hpp"
#include "canary/text.hpp"

using namespace canary;

namespace {

const Timestamp kNow = parse_rfc3339("2025-03-01T00:00:00Z");

AuditReport reference(const std::vector<TokenAssignment>& as) {
  std::vector<TokenRef> refs;
  for (const auto& a : as)
    for (const auto& [slot, v] : a.values) refs.push_back({a.site_id, slot, a.fingerprint, v});
  AuditReport r;
  for (std::size_t i = 0; i < refs.size(); ++i)
    for (std::size_t j = 0; j < refs.size(); ++j) {
      if (i == j) continue;
      const auto& a = refs[i];
      const auto& b = refs[j];
      auto ka = comparison_key(a.value), kb = comparison_key(b.value);
      if (i < j && ka == kb) {
        TokenPair p = a < b ? TokenPair{a, b} : TokenPair{b, a};
        if (a.site_id == b.site_id && a.slot_id == b.slot_id)
          r.duplicate_value_pairs.push_back(p);
        else
          r.cross_variable_pairs.push_back(p);
      }
      if (ka != kb && kb.size() > ka.size()) {
        for (std::size_t pos = kb.find(ka); pos != std::string::npos; pos = kb.find(ka, pos + 1))
          if (boundary_match_at(kb, pos, ka)) {
            r.subset_pairs.push_back({a, b});
            break;
          }
      }
    }
  std::sort(r.duplicate_value_pairs.begin(), r.duplicate_value_pairs.end());
  std::sort(r.cross_variable_pairs.begin(), r.cross_variable_pairs.end());
  std::sort(r.subset_pairs.begin(), r.subset_pairs.end());
  return r;
}

}  // namespace

TEST_CASE("West Port contains Port; Portland does not") {
  std::vector<TokenAssignment> as{
      {"s1", {"A", 1}, {{3, "Port"}}, kNow},
      {"s1", {"B", 1}, {{3, "West Port"}}, kNow},
      {"s2", {"A", 1}, {{3, "Portland"}}, kNow},
  };
  auto r = audit_assignments(as, {});
  REQUIRE(r.subset_pairs.size() == 1);
  CHECK(r.subset_pairs[0].first.value == "Port");
  CHECK(r.subset_pairs[0].second.value == "West Port");
  CHECK(r.duplicate_value_pairs.empty());
  CHECK(r.cross_variable_pairs.empty());
  auto flags = value_flags(r);
  CHECK(flags["port"].subset_member);
  CHECK(flags["west port"].subset_member);
  CHECK_FALSE(flags.contains("portland"));
}

TEST_CASE("duplicate and cross-variable values") {
  std::vector<TokenAssignment> as{
      {"s1", {"A", 1}, {{1, "John"}, {2, "Kim"}}, kNow},
      {"s1", {"B", 1}, {{1, "john"}, {2, "Lee"}}, kNow},
      {"s2", {"A", 1}, {{1, "Ann"}, {2, "Ann"}}, kNow},
  };
  auto r = audit_assignments(as, {{{"s1", 2}, SpaceKind::Number}});
  CHECK(r.duplicate_value_pairs.size() == 1);
  CHECK(r.cross_variable_pairs.size() == 1);
  CHECK(r.numeric_values.size() == 2);
  CHECK_FALSE(r.clean());
  auto flags = value_flags(r);
  CHECK(flags["john"].duplicate);
  CHECK(flags["ann"].cross_variable);
  CHECK(flags["kim"].numeric);
}

TEST_CASE("audit agrees with a quadratic reference on random stores") {
  const std::vector<std::string> words{"Port", "West", "West Port", "Ash", "Ash Vale", "Vale", "Ashford", "Port Ash",
                                       "North West Port", "Dale", "dale", "Ash-Vale"};
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TokenAssignment> as;
    for (int site = 0; site < 3; ++site)
      for (int f = 0; f < 4; ++f) {
        TokenAssignment a{"s" + std::to_string(site), {"UA" + std::to_string(f), 1}, {}, kNow};
        for (int slot = 1; slot <= 3; ++slot) a.values[slot] = words[rng.below(words.size())];
        as.push_back(a);
      }
    auto got = audit_assignments(as, {});
    auto want = reference(as);
    REQUIRE(got.duplicate_value_pairs == want.duplicate_value_pairs);
    REQUIRE(got.cross_variable_pairs == want.cross_variable_pairs);
    REQUIRE(got.subset_pairs == want.subset_pairs);
  }
}
