#include "canary/audit.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "canary/text.hpp"

namespace canary {

namespace {

bool same_owner_slot(const TokenRef& a, const TokenRef& b) { return a.site_id == b.site_id && a.slot_id == b.slot_id; }

TokenPair ordered(const TokenRef& a, const TokenRef& b) { return a < b ? TokenPair{a, b} : TokenPair{b, a}; }

}  // namespace

AuditReport audit_assignments(const std::vector<TokenAssignment>& assignments,
                              const std::map<std::pair<std::string, int>, SpaceKind>& kinds) {
  std::vector<TokenRef> refs;
  std::vector<std::string> keys;
  for (const auto& a : assignments)
    for (const auto& [slot, v] : a.values) refs.push_back({a.site_id, slot, a.fingerprint, v});
  std::sort(refs.begin(), refs.end());
  keys.reserve(refs.size());
  for (const auto& r : refs) keys.push_back(comparison_key(r.value));

  AuditReport report;
  std::unordered_map<std::string, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    by_key[keys[i]].push_back(i);
    auto k = kinds.find({refs[i].site_id, refs[i].slot_id});
    if (k != kinds.end() && is_numeric_kind(k->second)) report.numeric_values.push_back(refs[i]);
  }

  for (const auto& [_, members] : by_key)
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y) {
        const auto& a = refs[members[x]];
        const auto& b = refs[members[y]];
        if (same_owner_slot(a, b)) {
          if (a.fingerprint != b.fingerprint) report.duplicate_value_pairs.push_back(ordered(a, b));
        } else {
          report.cross_variable_pairs.push_back(ordered(a, b));
        }
      }

  for (std::size_t i = 0; i < refs.size(); ++i) {
    std::unordered_set<std::string> seen;
    for (auto span : boundary_spans(keys[i])) {
      std::string s(span);
      if (!seen.insert(s).second) continue;
      auto hit = by_key.find(s);
      if (hit == by_key.end()) continue;
      for (auto j : hit->second) report.subset_pairs.push_back({refs[j], refs[i]});
    }
  }

  std::sort(report.duplicate_value_pairs.begin(), report.duplicate_value_pairs.end());
  std::sort(report.cross_variable_pairs.begin(), report.cross_variable_pairs.end());
  std::sort(report.subset_pairs.begin(), report.subset_pairs.end());
  return report;
}

AuditReport audit_assignments(const TokenStore& store) {
  std::map<std::pair<std::string, int>, SpaceKind> kinds;
  for (const auto& site : store.sites())
    for (int slot = 1; slot <= kSlotsPerSite; ++slot)
      if (auto b = store.binding(site, slot)) kinds[{site, slot}] = b->kind;
  return audit_assignments(store.assignments(), kinds);
}

std::map<std::string, ValueFlags> value_flags(const AuditReport& report) {
  std::map<std::string, ValueFlags> flags;
  for (const auto& p : report.duplicate_value_pairs) flags[comparison_key(p.first.value)].duplicate = true;
  for (const auto& p : report.cross_variable_pairs) flags[comparison_key(p.first.value)].cross_variable = true;
  for (const auto& p : report.subset_pairs) {
    flags[comparison_key(p.first.value)].subset_member = true;
    flags[comparison_key(p.second.value)].subset_member = true;
  }
  for (const auto& r : report.numeric_values) flags[comparison_key(r.value)].numeric = true;
  return flags;
}

}  // namespace canary
