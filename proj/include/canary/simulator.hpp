#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "canary/asn_database.hpp"
#include "canary/canary_server.hpp"
#include "canary/extraction.hpp"
#include "canary/inference.hpp"
#include "canary/response_store.hpp"
#include "canary/scenario.hpp"

namespace canary {

using ChatbotFingerprint = std::pair<std::string, ScraperFingerprint>;

/// Which fingerprints' content each chatbot actually used, and how many
/// attributable tokens (non-numeric, free of any audit flag) each
/// fingerprint put into its answers: distinct per interaction, summed.
struct GroundTruth {
  std::map<std::string, std::set<ScraperFingerprint>> sources;
  std::map<ChatbotFingerprint, std::uint64_t> delivered;
};

std::string ground_truth_to_json(const GroundTruth& g);
GroundTruth ground_truth_from_json(std::string_view text);
GroundTruth read_ground_truth(const std::filesystem::path& path);

/// One value a simulated chatbot wrote into an answer.
struct EmittedToken {
  std::string chatbot_id;
  std::string interaction_id;
  int query_index = 1;
  std::string site_id;
  int slot_id = 0;
  std::string value;
  std::optional<ScraperFingerprint> source;  // empty for hallucinations
};

struct SimulationResult {
  Scenario scenario;
  CampaignPlan plan;
  std::vector<std::string> site_ids;
  std::shared_ptr<TokenStore> store;
  AsnDatabase asn_db;
  std::vector<ResponseRecord> responses;
  std::vector<VisitRecord> visits;
  std::vector<VisitRecord> misc;
  std::vector<ConditionTransition> transitions;
  std::vector<EmittedToken> emitted;
  GroundTruth truth;
};

/// Runs the whole campaign in simulated time against an in-process server.
/// Deterministic for a given scenario (including its seed).
SimulationResult run_scenario(const Scenario& scenario);

/// The sites a scenario serves: its template directory or synthetic sites.
std::vector<SiteTemplate> scenario_sites(const Scenario& scenario);

/// Writes visits/, responses.jsonl, store/, ground_truth.json, agents.toml
/// and transitions.jsonl in the formats the live tools produce.
void write_simulation(const SimulationResult& result, const std::filesystem::path& dir);

struct Analysis {
  std::vector<TokenHit> hits;
  InferenceResult inference;
};

Analysis analyze(const SimulationResult& result, const InferenceOptions& options = {});

struct Evaluation {
  std::vector<ChatbotFingerprint> false_positives;  // attributed but never a source
  std::vector<ChatbotFingerprint> false_negatives;  // delivered >= min_tokens but not attributed
  std::size_t attributed = 0;
  std::size_t eligible = 0;
  double precision = 1.0;
  double recall = 1.0;  // over eligible pairs
  bool exact() const { return false_positives.empty() && false_negatives.empty(); }
};

Evaluation evaluate_inference(const GroundTruth& truth, const InferenceResult& inference,
                              std::uint64_t min_tokens = 2);

/// True when any "Disallow: /" line appears in the body.
bool robots_disallows_all(std::string_view body);

}  // namespace canary
