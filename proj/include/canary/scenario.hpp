#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "canary/campaign.hpp"
#include "canary/inference.hpp"
#include "canary/site_template.hpp"
#include "canary/token_store.hpp"
#include "canary/value_space.hpp"

namespace canary {

enum class FetchMode { Direct, FeedsSearchCache };

struct ScraperBehavior {
  std::string id;
  std::vector<std::string> user_agents;  // one for a fixed policy
  bool rotate = false;                   // round-robin over user_agents, one UA per site visit
  std::uint32_t asn = 0;
  FetchMode fetch_mode = FetchMode::Direct;
  std::string cache_id;                       // FeedsSearchCache only
  bool respects_robots = true;
  bool revisit_when_offline = true;           // keep crawling a site after it returned 404
  std::optional<Duration> crawl_interval;     // periodic crawling; required for feeders
};

struct SourceRef {
  enum class Kind { Scraper, Cache } kind = Kind::Scraper;
  std::string id;
};

struct ChatbotWiring {
  std::string id;
  std::vector<SourceRef> sources;
  bool caches_content = false;
  Duration cache_ttl = days(30);
  double hallucination_prob = 0.0;
  bool respects_blocking_signals = false;
};

struct Scenario {
  std::uint64_t seed = 0;
  double omission_prob = 0.3;
  Timestamp start{};
  ExclusionScope exclusion_scope = ExclusionScope::Slot;

  std::vector<ValueSpaceSpec> spaces;  // in addition to the builtin ones
  int synthetic_sites = 20;
  std::vector<std::string> synthetic_slot_spaces;  // 10 space ids; empty = default mix
  std::filesystem::path templates_dir;             // used instead of synthetic sites when set

  std::vector<ScraperBehavior> scrapers;
  std::vector<std::string> caches;
  std::vector<ChatbotWiring> chatbots;

  /// Raw [[stages]] TOML (resolved once site ids are known); empty selects
  /// the default three-stage plan.
  std::string plan_toml;
  AgentLists agents;
};

std::string_view to_string(FetchMode m);

/// Throws ConfigError on unresolved references, empty source lists, empty
/// UA lists, repeated ids or probabilities outside [0, 1].
void validate_scenario(const Scenario& s);

/// `base_dir` resolves a relative templates path.
Scenario parse_scenario(std::string_view toml_text, const std::filesystem::path& base_dir = {},
                        const std::string& origin = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

/// Default slot mix of synthetic sites: given name, surname, two places,
/// organisation, two titles, number, date, phone.
extern const std::vector<std::string> kSyntheticSlotSpaces;

/// Fictional site number `index` (0-based) with three pages and a profile;
/// hosted at site-NN.example.
SiteTemplate synthetic_site(int index, const std::vector<std::string>& slot_spaces);

/// Reads the `[agents]` table (search_families, declared.<chatbot>,
/// publicly_known.<chatbot>) from a TOML document.
AgentLists parse_agent_lists(std::string_view toml_text, const std::string& origin = "agents");
std::string agent_lists_toml(const AgentLists& lists);

}  // namespace canary
