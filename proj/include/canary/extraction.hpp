#pragma once

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "canary/audit.hpp"
#include "canary/response_store.hpp"
#include "canary/token_store.hpp"

namespace canary {

struct TokenOwner {
  std::string site_id;
  int slot_id = 0;
  ScraperFingerprint fingerprint;
  std::string value;  // as served
  SpaceKind kind = SpaceKind::Word;
};

struct IndexedValue {
  std::string key;  // normalized
  std::vector<TokenOwner> owners;
  ValueFlags flags;
};

/// Inverted index from normalized token value to its owners, with the audit
/// flags of the store snapshot it was built from. Immutable after build.
class TokenIndex {
 public:
  static TokenIndex build(const TokenStore& store);
  static TokenIndex build(const std::vector<TokenAssignment>& assignments,
                          const std::map<std::pair<std::string, int>, SpaceKind>& kinds);

  const IndexedValue* find(std::string_view normalized) const;
  const std::vector<IndexedValue>& values() const { return values_; }

  /// Longest indexed value starting at `pos` of normalized text that sits
  /// on word boundaries; nullptr when none does.
  const IndexedValue* longest_at(std::string_view text, std::size_t pos) const;

 private:
  std::vector<IndexedValue> values_;
  std::unordered_map<std::string_view, std::size_t> by_key_;
  // Candidate lengths per first byte, longest first.
  std::array<std::vector<std::size_t>, 256> lengths_;
};

enum class MatchKind { Literal, Normalized };
std::string_view to_string(MatchKind k);

/// Why a hit was set aside, in filter precedence order.
enum class DiscardReason { None, ConfusionNumerical, ConfusionSubsets, TokenOverlap, BelowMatchScore };
std::string_view to_string(DiscardReason r);
DiscardReason parse_discard_reason(std::string_view text);

struct TokenHit {
  std::string chatbot_id;
  std::string interaction_id;
  int query_index = 1;
  std::string round_label;
  std::string response_site_id;  // site the query was about
  std::string value;
  std::string site_id;  // site that served the token
  int slot_id = 0;
  ScraperFingerprint fingerprint;
  SpaceKind kind = SpaceKind::Word;
  MatchKind match_kind = MatchKind::Normalized;
  DiscardReason discard = DiscardReason::None;

  bool operator==(const TokenHit&) const = default;
};

std::string hit_to_json(const TokenHit& h);
TokenHit hit_from_json(std::string_view line);
std::vector<TokenHit> read_hits(const std::filesystem::path& path);

/// Leftmost-longest scan of the normalized response: each match consumes
/// its span and yields one hit per owner; a (value, owner) pair is reported
/// once per response.
std::vector<TokenHit> extract_tokens(const ResponseRecord& response, const TokenIndex& index);

struct FilterPolicy {
  bool discard_numeric = true;
  bool discard_subsets = true;
  bool discard_overlap = true;
};

struct DiscardBreakdown {
  std::uint64_t total_found = 0;
  std::uint64_t confusion_numerical = 0;
  std::uint64_t confusion_subsets = 0;
  std::uint64_t token_overlap = 0;
  std::uint64_t below_match_score = 0;

  std::uint64_t total_discarded() const {
    return confusion_numerical + confusion_subsets + token_overlap + below_match_score;
  }
  void count(DiscardReason r);
  bool operator==(const DiscardBreakdown&) const = default;
};

/// Row labels of the discard breakdown, top to bottom.
extern const std::vector<std::string> kBreakdownRowLabels;

struct FilterResult {
  std::vector<TokenHit> accepted;
  std::vector<TokenHit> discarded;  // discard set
  DiscardBreakdown breakdown;
};

/// Single-category attribution in order: numeric space, subset member,
/// duplicate/cross-variable overlap. Hits carry their reason on return.
FilterResult filter_hits(std::vector<TokenHit> hits, const TokenIndex& index, const FilterPolicy& policy = {});

/// One column per round label, plus hits from unlisted rounds appended in
/// first-seen order.
std::string breakdown_csv(const std::map<std::string, DiscardBreakdown>& by_round,
                          const std::vector<std::string>& column_order);

}  // namespace canary
