#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "canary/extraction.hpp"
#include "canary/response_store.hpp"

namespace canary {

struct InteractionMeta {
  std::string interaction_id;
  std::string chatbot_id;
  std::string site_id;
  std::string round_label;
  SiteCondition condition = SiteCondition::Online;
};

/// One entry per interaction id seen in the responses.
std::map<std::string, InteractionMeta> interaction_metadata(const std::vector<ResponseRecord>& responses);

struct Evidence {
  std::string chatbot_id;
  ScraperFingerprint fingerprint;
  std::uint64_t T = 0;  // distinct tokens per interaction, summed over interactions
  std::uint64_t W = 0;  // distinct interactions with at least one token
  std::set<std::string> contributing_sites;
  std::set<std::string> interactions;
};

/// Accepted hits grouped per (chatbot, fingerprint), in that order. A token
/// seen in both queries of one interaction counts once. Throws
/// DataIntegrityError for hits whose interaction is not in `meta`.
std::vector<Evidence> aggregate_evidence(const std::vector<TokenHit>& accepted,
                                         const std::map<std::string, InteractionMeta>& meta);

enum class MatchVariant { Default, Literal };
MatchVariant parse_match_variant(std::string_view text);
std::string_view to_string(MatchVariant v);

struct MatchVerdict {
  std::string chatbot_id;
  ScraperFingerprint fingerprint;
  bool decision = false;
  std::uint64_t t = 2;
  std::uint64_t w = 1;
  MatchVariant variant = MatchVariant::Default;
};

/// Default: yes unless the evidence is a single token from a single
/// interaction (T <= 1 and W <= 1). Literal: yes iff T >= t or W >= w.
/// Throws ConfigError when t or w is below 1.
MatchVerdict match_score(const Evidence& e, std::uint64_t t, std::uint64_t w, MatchVariant variant);

enum class AgentCategory { FirstPartyDeclared, GenericBrowser, ThirdPartySearch };
std::string_view to_string(AgentCategory c);

struct AgentLists {
  std::map<std::string, std::set<std::string>> declared;         // chatbot -> UA families it self-declares
  std::set<std::string> search_families;                          // third-party search crawlers
  std::map<std::string, std::set<std::string>> publicly_known;    // chatbot -> documented families
};

AgentCategory classify_agent(const std::string& chatbot_id, const std::string& ua_family, const AgentLists& lists);

struct InferenceOptions {
  std::uint64_t t = 2;
  std::uint64_t w = 1;
  MatchVariant variant = MatchVariant::Default;
};

struct InferenceResult {
  std::vector<Evidence> evidence;
  std::vector<MatchVerdict> verdicts;          // parallel to evidence
  std::vector<TokenHit> attributed;            // accepted hits for yes verdicts
  std::map<std::string, DiscardBreakdown> breakdown;  // per round label, including below_match_score
};

/// Filters the raw hits, aggregates, scores and folds below-threshold hits
/// back into the breakdown.
InferenceResult infer(const std::vector<TokenHit>& hits_with_discards, const std::vector<ResponseRecord>& responses,
                      const InferenceOptions& options);

std::string verdicts_csv(const InferenceResult& r);

}  // namespace canary
