#include "doctest.h"

#include <set>

#include "canary/extraction.hpp"
#include "canary/inference.hpp"
#include "canary/normalize.hpp"
#include "test_util.hpp"

using namespace canary;

namespace {

const Timestamp kNow = parse_rfc3339("2025-03-01T00:00:00Z");

ResponseRecord response(const std::string& text, const std::string& iid = "i1", int q = 1,
                        const std::string& chatbot = "Bot", const std::string& site = "s1",
                        const std::string& round = "baseline") {
  ResponseRecord r;
  r.chatbot_id = chatbot;
  r.site_id = site;
  r.interaction_id = iid;
  r.query_index = q;
  r.round_label = round;
  r.raw_text = text;
  r.timestamp = kNow;
  return r;
}

using Owned = std::set<std::tuple<std::string, std::string, int, ScraperFingerprint>>;

// Leftmost-longest scan with a linear search over every indexed key.
Owned brute_force(const std::string& raw, const TokenIndex& index) {
  Owned out;
  auto text = normalize_response(raw);
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (pos > 0 && is_word_byte(text[pos]) && is_word_byte(text[pos - 1])) {
      ++pos;
      continue;
    }
    const IndexedValue* best = nullptr;
    for (const auto& v : index.values())
      if (text.compare(pos, v.key.size(), v.key) == 0 && boundary_match_at(text, pos, v.key) &&
          (!best || v.key.size() > best->key.size()))
        best = &v;
    if (!best) {
      ++pos;
      continue;
    }
    for (const auto& o : best->owners) out.emplace(best->key, o.site_id, o.slot_id, o.fingerprint);
    pos += best->key.size();
  }
  return out;
}

}  // namespace

TEST_CASE("extraction finds normalized tokens at boundaries") {
  std::vector<TokenAssignment> as{{"s1", {"UA", 1}, {{1, "Ash Vale"}, {8, "1234567"}, {10, "555-123-4567"}}, kNow}};
  auto idx = TokenIndex::build(as, {{{"s1", 8}, SpaceKind::Number}, {{"s1", 10}, SpaceKind::Phone}});
  auto hits = extract_tokens(response("From ASH  VALE. It has 1,234,567 items; call (555) 123-4567 or Ash Vale."), idx);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].slot_id == 1);
  CHECK(hits[0].match_kind == MatchKind::Literal);
  CHECK(hits[1].kind == SpaceKind::Number);
  CHECK(hits[1].match_kind == MatchKind::Normalized);
  CHECK(hits[2].slot_id == 10);
  CHECK(extract_tokens(response("Ash Valerie and Ash-Vale"), idx).empty());
  auto failed = response("Ash Vale");
  failed.failed = true;
  CHECK(extract_tokens(failed, idx).empty());
}

TEST_CASE("longest match consumes the span") {
  std::vector<TokenAssignment> as{{"s1", {"A", 1}, {{3, "Port"}}, kNow}, {"s1", {"B", 1}, {{3, "West Port"}}, kNow}};
  auto idx = TokenIndex::build(as, {});
  auto hits = extract_tokens(response("It is in West Port."), idx);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].fingerprint.user_agent == "B");
  auto both = extract_tokens(response("West Port, then Port."), idx);
  CHECK(both.size() == 2);
}

TEST_CASE("extraction agrees with a brute-force scan") {
  TokenStore store;
  testutil::register_builtins(store);
  store.register_site("s1", testutil::default_slots());
  store.register_site("s2", testutil::default_slots());
  std::vector<std::string> served;
  for (int i = 0; i < 40; ++i)
    for (const auto* s : {"s1", "s2"})
      for (const auto& [_, v] : store.get_or_create(s, {"UA" + std::to_string(i), 1}, kNow).assignment.values)
        served.push_back(v);
  auto idx = TokenIndex::build(store);
  Rng rng(9);
  const std::vector<std::string> filler{"the", "and", "West", "a", ",", ".", "Suite", "1,000", "(555)", "ford", "-"};
  for (int trial = 0; trial < 400; ++trial) {
    std::string text;
    for (int k = 0; k < 12; ++k) {
      text += rng.chance(0.4) ? served[rng.below(served.size())] : filler[rng.below(filler.size())];
      text += rng.chance(0.8) ? " " : "";
    }
    Owned got;
    for (const auto& h : extract_tokens(response(text), idx))
      got.emplace(normalize_response(h.value), h.site_id, h.slot_id, h.fingerprint);
    CAPTURE(text);
    REQUIRE(got == brute_force(text, idx));
  }
}

TEST_CASE("filters partition hits by single category in precedence order") {
  std::vector<TokenAssignment> as{
      {"s1", {"A", 1}, {{1, "Port"}, {2, "John"}, {3, "Umber"}, {8, "2024"}}, kNow},
      {"s1", {"B", 1}, {{1, "West Port"}, {2, "John"}, {3, "Kestrel"}, {8, "1999"}}, kNow},
  };
  auto idx = TokenIndex::build(as, {{{"s1", 8}, SpaceKind::Number}});
  auto hits = extract_tokens(response("Port, West Port, John, Umber, Kestrel, 2024, 1999"), idx);
  CHECK(hits.size() == 8);
  auto r = filter_hits(hits, idx);
  CHECK(r.accepted.size() + r.discarded.size() == hits.size());
  CHECK(r.breakdown.total_found == hits.size());
  CHECK(r.breakdown.confusion_numerical == 2);
  CHECK(r.breakdown.confusion_subsets == 2);
  CHECK(r.breakdown.token_overlap == 2);
  CHECK(r.accepted.size() == 2);
  for (const auto& h : r.accepted) CHECK(h.discard == DiscardReason::None);
  for (const auto& h : r.discarded) CHECK(h.discard != DiscardReason::None);
  auto keep = filter_hits(hits, idx, {false, false, false});
  CHECK(keep.accepted.size() == hits.size());
}

TEST_CASE("hit JSON round-trips") {
  TokenHit h{"Bot", "i1", 2, "r", "s1", "Ash \"Vale\"", "s2", 3, {"UA", 9}, SpaceKind::PlaceName,
             MatchKind::Literal, DiscardReason::TokenOverlap};
  CHECK(hit_from_json(hit_to_json(h)) == h);
  for (auto r : {DiscardReason::None, DiscardReason::ConfusionNumerical, DiscardReason::ConfusionSubsets,
                 DiscardReason::TokenOverlap, DiscardReason::BelowMatchScore})
    CHECK(parse_discard_reason(to_string(r)) == r);
}

TEST_CASE("evidence counts distinct tokens per interaction") {
  std::vector<ResponseRecord> rs{response("x", "i1", 1), response("x", "i1", 2), response("x", "i2", 1)};
  auto meta = interaction_metadata(rs);
  TokenHit base{"Bot", "i1", 1, "baseline", "s1", "Alpha", "s1", 1, {"UA", 1}, SpaceKind::Word, MatchKind::Literal,
                DiscardReason::None};
  auto q2 = base;
  q2.query_index = 2;
  auto other = base;
  other.slot_id = 2;
  other.value = "Beta";
  auto later = base;
  later.interaction_id = "i2";
  auto ev = aggregate_evidence({base, q2, other, later}, meta);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].T == 3);
  CHECK(ev[0].W == 2);
  auto orphan = base;
  orphan.interaction_id = "nope";
  CHECK_THROWS(aggregate_evidence({orphan}, meta));
  auto bad = rs;
  bad[1].chatbot_id = "Other";
  CHECK_THROWS(interaction_metadata(bad));
}

TEST_CASE("match score rules") {
  Evidence e;
  auto decide = [&](std::uint64_t T, std::uint64_t W, std::uint64_t t, std::uint64_t w, MatchVariant v) {
    e.T = T;
    e.W = W;
    return match_score(e, t, w, v).decision;
  };
  CHECK_FALSE(decide(1, 1, 2, 1, MatchVariant::Default));
  CHECK(decide(2, 1, 2, 1, MatchVariant::Default));
  CHECK(decide(2, 2, 2, 1, MatchVariant::Default));
  CHECK(decide(1, 1, 2, 1, MatchVariant::Literal));
  CHECK_FALSE(decide(1, 1, 2, 2, MatchVariant::Literal));
  CHECK(decide(2, 1, 2, 2, MatchVariant::Literal));
  CHECK_THROWS(decide(1, 1, 0, 1, MatchVariant::Default));
  CHECK_THROWS(decide(1, 1, 1, 0, MatchVariant::Literal));
  CHECK(parse_match_variant("literal") == MatchVariant::Literal);
  CHECK_THROWS(parse_match_variant("loose"));
}

TEST_CASE("infer folds below-threshold hits into the breakdown") {
  std::vector<ResponseRecord> rs{response("x", "i1"), response("x", "i2", 1, "Bot", "s1", "1-week-offline")};
  TokenHit a{"Bot", "i1", 1, "baseline", "s1", "Alpha", "s1", 1, {"UA", 1}, SpaceKind::Word, MatchKind::Literal,
             DiscardReason::None};
  auto b = a;
  b.slot_id = 2;
  b.value = "Beta";
  auto lone = a;
  lone.interaction_id = "i2";
  lone.round_label = "1-week-offline";
  lone.fingerprint = {"Lonely", 2};
  auto numeric = a;
  numeric.discard = DiscardReason::ConfusionNumerical;
  auto r = infer({a, b, lone, numeric}, rs, {});
  REQUIRE(r.verdicts.size() == 2);
  CHECK(r.attributed.size() == 2);
  CHECK(r.breakdown["baseline"].total_found == 3);
  CHECK(r.breakdown["baseline"].confusion_numerical == 1);
  CHECK(r.breakdown["1-week-offline"].below_match_score == 1);
  CHECK(verdicts_csv(r).find(",1,1,1,no,default,2,1\n") != std::string::npos);
  auto csv = breakdown_csv(r.breakdown, {"baseline", "1-week-offline", "2-weeks-offline"});
  CHECK(csv.rfind("category,baseline,1-week-offline,2-weeks-offline\n", 0) == 0);
}

TEST_CASE("agent classification") {
  AgentLists lists;
  lists.declared["ChatGPT"] = {"ChatGPT-User", "OAI-SearchBot"};
  lists.search_families = {"Googlebot", "Bingbot"};
  CHECK(classify_agent("ChatGPT", "OAI-SearchBot", lists) == AgentCategory::FirstPartyDeclared);
  CHECK(classify_agent("Gemini", "OAI-SearchBot", lists) == AgentCategory::GenericBrowser);
  CHECK(classify_agent("Gemini", "Googlebot", lists) == AgentCategory::ThirdPartySearch);
  CHECK(classify_agent("Kimi", "Chrome", lists) == AgentCategory::GenericBrowser);
}
