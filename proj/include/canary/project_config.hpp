#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "canary/adapter_client.hpp"
#include "canary/api_client.hpp"
#include "canary/inference.hpp"
#include "canary/token_store.hpp"
#include "canary/value_space.hpp"

namespace canary {

struct ChatbotConfig {
  std::string id;
  Transport transport = Transport::Api;
  ApiClientConfig api;          // Transport::Api
  AdapterClientConfig adapter;  // Transport::BrowserAdapter
};

/// Deployment configuration. Relative paths resolve against the directory
/// of the config file.
struct ProjectConfig {
  std::filesystem::path templates_dir = "sites";
  std::filesystem::path store_dir = "var/store";
  std::filesystem::path visits_dir = "var/visits";
  std::filesystem::path misc_dir = "var/misc";
  std::filesystem::path responses_path = "var/responses";
  std::filesystem::path transitions_path = "var/transitions.jsonl";
  std::filesystem::path asn_db;  // empty: every ASN resolves to 0
  std::filesystem::path plan_path;  // empty: the default plan

  std::string listen = "127.0.0.1:8080";
  std::string ip_salt = "canary";
  bool interlink = true;

  TokenPolicy tokens;
  std::vector<ValueSpaceSpec> spaces;

  InferenceOptions inference;
  std::optional<Timestamp> campaign_start;  // anchors the default plan
  Duration politeness_delay = std::chrono::seconds(5);
  std::vector<ChatbotConfig> chatbots;
  AgentLists agents;
};

/// Throws ConfigError; t and w below 1 are rejected here as well.
ProjectConfig parse_project_config(std::string_view toml_text, const std::filesystem::path& base_dir = {},
                                   const std::string& origin = "config");
ProjectConfig load_project_config(const std::filesystem::path& path);

/// Builtin plus configured spaces, ready to register with a store.
std::vector<ValueSpace> config_spaces(const ProjectConfig& config);

std::unique_ptr<ChatbotClient> make_chatbot_client(const ChatbotConfig& c);

}  // namespace canary
