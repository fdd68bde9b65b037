#pragma once

#include <map>
#include <string>
#include <vector>

#include "canary/token_store.hpp"

namespace canary {

struct TokenRef {
  std::string site_id;
  int slot_id = 0;
  ScraperFingerprint fingerprint;
  std::string value;

  auto operator<=>(const TokenRef&) const = default;
  bool operator==(const TokenRef&) const = default;
};

/// Two served tokens in one confusion relation. For subset pairs `first` is
/// the contained value and `second` the containing one.
struct TokenPair {
  TokenRef first;
  TokenRef second;

  auto operator<=>(const TokenPair&) const = default;
  bool operator==(const TokenPair&) const = default;
};

struct AuditReport {
  std::vector<TokenPair> duplicate_value_pairs;  // same value, same site+slot
  std::vector<TokenPair> cross_variable_pairs;   // same value, different site+slot
  std::vector<TokenPair> subset_pairs;           // first occurs inside second at word boundaries
  std::vector<TokenRef> numeric_values;          // from number, date and phone spaces

  bool clean() const {
    return duplicate_value_pairs.empty() && cross_variable_pairs.empty() && subset_pairs.empty();
  }
};

/// Per comparison key, which confusion categories the value falls into.
struct ValueFlags {
  bool duplicate = false;
  bool cross_variable = false;
  bool subset_member = false;  // either side of a subset pair
  bool numeric = false;
};

/// `kinds` maps (site, slot) to the kind of the bound space; slots missing
/// from it count as non-numeric.
AuditReport audit_assignments(const std::vector<TokenAssignment>& assignments,
                              const std::map<std::pair<std::string, int>, SpaceKind>& kinds);
AuditReport audit_assignments(const TokenStore& store);

std::map<std::string, ValueFlags> value_flags(const AuditReport& report);

}  // namespace canary
