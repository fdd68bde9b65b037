#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "canary/campaign.hpp"
#include "canary/project_config.hpp"

namespace canary::cli {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string config_path;
  std::string output;  // csv | jsonl; empty means csv (or text where a command has one)
  std::function<int()> action;

  /// The --config file, or defaults relative to the working directory.
  ProjectConfig config() const;
  bool jsonl() const { return output == "jsonl"; }
};

/// Empty `override_value` keeps the configured path.
std::filesystem::path pick(const std::string& override_value, const std::filesystem::path& configured);

CampaignPlan project_plan(const ProjectConfig& c, const std::vector<std::string>& site_ids);

void write_text(const std::string& path, const std::string& text, std::ostream& fallback);

void add_server_commands(CLI::App& app, Context& ctx);
void add_campaign_commands(CLI::App& app, Context& ctx);
void add_analysis_commands(CLI::App& app, Context& ctx);

}  // namespace canary::cli
