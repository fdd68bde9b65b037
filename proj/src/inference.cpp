#include "canary/inference.hpp"

#include <sstream>

#include "canary/error.hpp"
#include "canary/text.hpp"

namespace canary {

std::map<std::string, InteractionMeta> interaction_metadata(const std::vector<ResponseRecord>& responses) {
  std::map<std::string, InteractionMeta> out;
  for (const auto& r : responses) {
    auto [it, fresh] =
        out.emplace(r.interaction_id, InteractionMeta{r.interaction_id, r.chatbot_id, r.site_id, r.round_label, r.condition});
    if (!fresh && (it->second.chatbot_id != r.chatbot_id || it->second.site_id != r.site_id))
      throw DataIntegrityError("interaction '" + r.interaction_id + "' spans several chatbots or sites");
  }
  return out;
}

std::vector<Evidence> aggregate_evidence(const std::vector<TokenHit>& accepted,
                                         const std::map<std::string, InteractionMeta>& meta) {
  using Key = std::pair<std::string, ScraperFingerprint>;
  std::map<Key, Evidence> ev;
  std::map<Key, std::set<std::tuple<std::string, std::string, int, std::string>>> tokens;
  for (const auto& h : accepted) {
    auto m = meta.find(h.interaction_id);
    if (m == meta.end()) throw DataIntegrityError("hit references unknown interaction '" + h.interaction_id + "'");
    Key key{m->second.chatbot_id, h.fingerprint};
    auto& e = ev[key];
    e.chatbot_id = key.first;
    e.fingerprint = key.second;
    if (tokens[key].emplace(h.interaction_id, h.site_id, h.slot_id, comparison_key(h.value)).second) ++e.T;
    if (e.interactions.insert(h.interaction_id).second) ++e.W;
    e.contributing_sites.insert(m->second.site_id);
  }
  std::vector<Evidence> out;
  out.reserve(ev.size());
  for (auto& [_, e] : ev) out.push_back(std::move(e));
  return out;
}

MatchVariant parse_match_variant(std::string_view text) {
  if (text == "default") return MatchVariant::Default;
  if (text == "literal") return MatchVariant::Literal;
  throw ConfigError("unknown match variant '" + std::string(text) + "' (default|literal)");
}

std::string_view to_string(MatchVariant v) { return v == MatchVariant::Default ? "default" : "literal"; }

MatchVerdict match_score(const Evidence& e, std::uint64_t t, std::uint64_t w, MatchVariant variant) {
  if (t < 1 || w < 1) throw ConfigError("match-score thresholds t and w must be at least 1");
  MatchVerdict v{e.chatbot_id, e.fingerprint, false, t, w, variant};
  if (variant == MatchVariant::Default)
    v.decision = !(e.T <= 1 && e.W <= 1);
  else
    v.decision = e.T >= t || e.W >= w;
  return v;
}

std::string_view to_string(AgentCategory c) {
  switch (c) {
    case AgentCategory::FirstPartyDeclared: return "First-Party Declared Agent";
    case AgentCategory::GenericBrowser: return "Generic Browser Agent";
    case AgentCategory::ThirdPartySearch: return "Third-Party Search Agent";
  }
  return "Generic Browser Agent";
}

AgentCategory classify_agent(const std::string& chatbot_id, const std::string& ua_family, const AgentLists& lists) {
  if (auto it = lists.declared.find(chatbot_id); it != lists.declared.end() && it->second.contains(ua_family))
    return AgentCategory::FirstPartyDeclared;
  if (lists.search_families.contains(ua_family)) return AgentCategory::ThirdPartySearch;
  return AgentCategory::GenericBrowser;
}

InferenceResult infer(const std::vector<TokenHit>& hits_with_discards, const std::vector<ResponseRecord>& responses,
                      const InferenceOptions& options) {
  if (options.t < 1 || options.w < 1) throw ConfigError("match-score thresholds t and w must be at least 1");
  auto meta = interaction_metadata(responses);
  // Rounds that produced responses get a column even with no hits.
  InferenceResult r;
  for (const auto& [_, m] : meta) r.breakdown[m.round_label];

  std::vector<TokenHit> accepted;
  for (const auto& h : hits_with_discards) {
    if (h.discard == DiscardReason::None)
      accepted.push_back(h);
    else
      r.breakdown[h.round_label].count(h.discard);
  }
  r.evidence = aggregate_evidence(accepted, meta);
  std::map<std::pair<std::string, ScraperFingerprint>, bool> decided;
  for (const auto& e : r.evidence) {
    r.verdicts.push_back(match_score(e, options.t, options.w, options.variant));
    decided[{e.chatbot_id, e.fingerprint}] = r.verdicts.back().decision;
  }
  for (auto h : accepted) {
    const auto& m = meta.at(h.interaction_id);
    if (decided[{m.chatbot_id, h.fingerprint}]) {
      r.breakdown[h.round_label].count(DiscardReason::None);
      r.attributed.push_back(std::move(h));
    } else {
      h.discard = DiscardReason::BelowMatchScore;
      r.breakdown[h.round_label].count(h.discard);
    }
  }
  return r;
}

std::string verdicts_csv(const InferenceResult& r) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "chatbot_id,user_agent,asn,ua_family,T,W,sites,decision,variant,t,w\n";
  for (std::size_t i = 0; i < r.evidence.size(); ++i) {
    const auto& e = r.evidence[i];
    const auto& v = r.verdicts[i];
    out << quote(e.chatbot_id) << "," << quote(e.fingerprint.user_agent) << "," << e.fingerprint.asn << ","
        << quote(parse_user_agent(e.fingerprint.user_agent).family) << "," << e.T << "," << e.W << ","
        << e.contributing_sites.size() << "," << (v.decision ? "yes" : "no") << "," << to_string(v.variant) << ","
        << v.t << "," << v.w << "\n";
  }
  return out.str();
}

}  // namespace canary
