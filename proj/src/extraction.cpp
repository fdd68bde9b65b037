#include "canary/extraction.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "canary/error.hpp"
#include "canary/jsonl.hpp"
#include "canary/normalize.hpp"
#include "canary/text.hpp"
#include "json.hpp"

namespace canary {

using nlohmann::json;

TokenIndex TokenIndex::build(const TokenStore& store) {
  std::map<std::pair<std::string, int>, SpaceKind> kinds;
  for (const auto& site : store.sites())
    for (int slot = 1; slot <= kSlotsPerSite; ++slot)
      if (auto b = store.binding(site, slot)) kinds[{site, slot}] = b->kind;
  return build(store.assignments(), kinds);
}

TokenIndex TokenIndex::build(const std::vector<TokenAssignment>& assignments,
                             const std::map<std::pair<std::string, int>, SpaceKind>& kinds) {
  auto flags = value_flags(audit_assignments(assignments, kinds));
  std::map<std::string, IndexedValue> grouped;
  for (const auto& a : assignments)
    for (const auto& [slot, v] : a.values) {
      auto key = normalize_response(v);
      if (key.empty()) continue;
      auto k = kinds.find({a.site_id, slot});
      auto kind = k == kinds.end() ? SpaceKind::Word : k->second;
      auto& entry = grouped[key];
      entry.key = key;
      entry.owners.push_back({a.site_id, slot, a.fingerprint, v, kind});
      if (auto f = flags.find(comparison_key(v)); f != flags.end()) {
        entry.flags.duplicate |= f->second.duplicate;
        entry.flags.cross_variable |= f->second.cross_variable;
        entry.flags.subset_member |= f->second.subset_member;
        entry.flags.numeric |= f->second.numeric;
      }
    }
  TokenIndex index;
  index.values_.reserve(grouped.size());
  for (auto& [_, v] : grouped) {
    std::sort(v.owners.begin(), v.owners.end(), [](const TokenOwner& x, const TokenOwner& y) {
      return std::tie(x.site_id, x.slot_id, x.fingerprint) < std::tie(y.site_id, y.slot_id, y.fingerprint);
    });
    // Two raw values folding to one key make the key ambiguous across owners.
    std::set<std::pair<std::string, int>> slots;
    for (const auto& o : v.owners) slots.insert({o.site_id, o.slot_id});
    if (slots.size() > 1) v.flags.cross_variable = true;
    if (v.owners.size() > slots.size()) v.flags.duplicate = true;
    index.values_.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < index.values_.size(); ++i) {
    const auto& key = index.values_[i].key;
    index.by_key_.emplace(std::string_view(key), i);
    auto& lens = index.lengths_[static_cast<unsigned char>(key.front())];
    if (std::find(lens.begin(), lens.end(), key.size()) == lens.end()) lens.push_back(key.size());
  }
  for (auto& lens : index.lengths_) std::sort(lens.rbegin(), lens.rend());
  return index;
}

const IndexedValue* TokenIndex::find(std::string_view normalized) const {
  auto it = by_key_.find(normalized);
  return it == by_key_.end() ? nullptr : &values_[it->second];
}

const IndexedValue* TokenIndex::longest_at(std::string_view text, std::size_t pos) const {
  if (pos >= text.size()) return nullptr;
  for (auto len : lengths_[static_cast<unsigned char>(text[pos])]) {
    if (pos + len > text.size()) continue;
    auto it = by_key_.find(text.substr(pos, len));
    if (it == by_key_.end()) continue;
    if (boundary_match_at(text, pos, values_[it->second].key)) return &values_[it->second];
  }
  return nullptr;
}

std::string_view to_string(MatchKind k) { return k == MatchKind::Literal ? "literal" : "normalized"; }

std::string_view to_string(DiscardReason r) {
  switch (r) {
    case DiscardReason::None: return "accepted";
    case DiscardReason::ConfusionNumerical: return "confusion_numerical";
    case DiscardReason::ConfusionSubsets: return "confusion_subsets";
    case DiscardReason::TokenOverlap: return "token_overlap";
    case DiscardReason::BelowMatchScore: return "below_match_score";
  }
  return "accepted";
}

DiscardReason parse_discard_reason(std::string_view text) {
  for (auto r : {DiscardReason::None, DiscardReason::ConfusionNumerical, DiscardReason::ConfusionSubsets,
                 DiscardReason::TokenOverlap, DiscardReason::BelowMatchScore})
    if (to_string(r) == text) return r;
  throw InputError("unknown discard reason '" + std::string(text) + "'");
}

std::string hit_to_json(const TokenHit& h) {
  json j{{"chatbot_id", h.chatbot_id},
         {"interaction_id", h.interaction_id},
         {"query_index", h.query_index},
         {"round_label", h.round_label},
         {"response_site_id", h.response_site_id},
         {"value", h.value},
         {"site_id", h.site_id},
         {"slot_id", h.slot_id},
         {"user_agent", h.fingerprint.user_agent},
         {"asn", h.fingerprint.asn},
         {"kind", std::string(to_string(h.kind))},
         {"match_kind", std::string(to_string(h.match_kind))},
         {"discard", std::string(to_string(h.discard))}};
  return j.dump();
}

TokenHit hit_from_json(std::string_view line) {
  auto j = json::parse(line);
  TokenHit h;
  h.chatbot_id = j.at("chatbot_id").get<std::string>();
  h.interaction_id = j.at("interaction_id").get<std::string>();
  h.query_index = j.at("query_index").get<int>();
  h.round_label = j.at("round_label").get<std::string>();
  h.response_site_id = j.value("response_site_id", "");
  h.value = j.at("value").get<std::string>();
  h.site_id = j.at("site_id").get<std::string>();
  h.slot_id = j.at("slot_id").get<int>();
  h.fingerprint = {j.at("user_agent").get<std::string>(), j.at("asn").get<std::uint32_t>()};
  h.kind = parse_space_kind(j.at("kind").get<std::string>());
  h.match_kind = j.at("match_kind").get<std::string>() == "literal" ? MatchKind::Literal : MatchKind::Normalized;
  h.discard = parse_discard_reason(j.value("discard", "accepted"));
  return h;
}

std::vector<TokenHit> read_hits(const std::filesystem::path& path) {
  std::vector<TokenHit> out;
  for (const auto& file : jsonl_files(path))
    for_each_jsonl_line(file, [&](std::string_view line, std::size_t n) {
      try {
        out.push_back(hit_from_json(line));
      } catch (const std::exception& e) {
        throw DataIntegrityError(file.string() + ":" + std::to_string(n) + ": " + e.what());
      }
    });
  return out;
}

std::vector<TokenHit> extract_tokens(const ResponseRecord& response, const TokenIndex& index) {
  std::vector<TokenHit> hits;
  if (response.failed || response.raw_text.empty()) return hits;
  auto text = normalize_response(response.raw_text);
  std::set<std::tuple<std::string, std::string, int, ScraperFingerprint>> seen;
  std::size_t pos = 0;
  while (pos < text.size()) {
    // Mid-word positions cannot start a match: the key would begin with a
    // word byte glued to the previous one.
    if (pos > 0 && is_word_byte(text[pos]) && is_word_byte(text[pos - 1])) {
      ++pos;
      continue;
    }
    const auto* v = index.longest_at(text, pos);
    if (!v) {
      ++pos;
      continue;
    }
    for (const auto& o : v->owners) {
      if (!seen.emplace(v->key, o.site_id, o.slot_id, o.fingerprint).second) continue;
      TokenHit h;
      h.chatbot_id = response.chatbot_id;
      h.interaction_id = response.interaction_id;
      h.query_index = response.query_index;
      h.round_label = response.round_label;
      h.response_site_id = response.site_id;
      h.value = o.value;
      h.site_id = o.site_id;
      h.slot_id = o.slot_id;
      h.fingerprint = o.fingerprint;
      h.kind = o.kind;
      h.match_kind = response.raw_text.find(o.value) != std::string::npos ? MatchKind::Literal : MatchKind::Normalized;
      hits.push_back(std::move(h));
    }
    pos += v->key.size();
  }
  return hits;
}

void DiscardBreakdown::count(DiscardReason r) {
  ++total_found;
  switch (r) {
    case DiscardReason::None: break;
    case DiscardReason::ConfusionNumerical: ++confusion_numerical; break;
    case DiscardReason::ConfusionSubsets: ++confusion_subsets; break;
    case DiscardReason::TokenOverlap: ++token_overlap; break;
    case DiscardReason::BelowMatchScore: ++below_match_score; break;
  }
}

const std::vector<std::string> kBreakdownRowLabels{"Total Tokens Found", "Confusion: numerical",
                                                   "Confusion: subsets", "Token Overlap",
                                                   "Below Match Score",  "Total Tokens Discarded"};

FilterResult filter_hits(std::vector<TokenHit> hits, const TokenIndex& index, const FilterPolicy& policy) {
  FilterResult out;
  for (auto& h : hits) {
    const auto* v = index.find(normalize_response(h.value));
    ValueFlags f = v ? v->flags : ValueFlags{};
    bool numeric = is_numeric_kind(h.kind) || f.numeric;
    if (policy.discard_numeric && numeric)
      h.discard = DiscardReason::ConfusionNumerical;
    else if (policy.discard_subsets && f.subset_member)
      h.discard = DiscardReason::ConfusionSubsets;
    else if (policy.discard_overlap && (f.duplicate || f.cross_variable))
      h.discard = DiscardReason::TokenOverlap;
    else
      h.discard = DiscardReason::None;
    out.breakdown.count(h.discard);
    (h.discard == DiscardReason::None ? out.accepted : out.discarded).push_back(std::move(h));
  }
  return out;
}

std::string breakdown_csv(const std::map<std::string, DiscardBreakdown>& by_round,
                          const std::vector<std::string>& column_order) {
  std::vector<std::string> cols = column_order;
  for (const auto& [label, _] : by_round)
    if (std::find(cols.begin(), cols.end(), label) == cols.end()) cols.push_back(label);
  auto cell = [&](const std::string& label, int row) -> std::uint64_t {
    auto it = by_round.find(label);
    if (it == by_round.end()) return 0;
    const auto& b = it->second;
    switch (row) {
      case 0: return b.total_found;
      case 1: return b.confusion_numerical;
      case 2: return b.confusion_subsets;
      case 3: return b.token_overlap;
      case 4: return b.below_match_score;
      default: return b.total_discarded();
    }
  };
  std::ostringstream out;
  out << "category";
  for (const auto& c : cols) out << "," << c;
  out << "\n";
  for (int row = 0; row < 6; ++row) {
    out << kBreakdownRowLabels[static_cast<std::size_t>(row)];
    for (const auto& c : cols) out << "," << cell(c, row);
    out << "\n";
  }
  return out.str();
}

}  // namespace canary
