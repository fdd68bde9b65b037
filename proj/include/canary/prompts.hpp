#pragma once

#include <string>
#include <string_view>

#include "canary/site_template.hpp"

namespace canary {

/// Shared by both queries of an interaction.
extern const std::string_view kFormattingSuffix;

struct PromptPair {
  std::string site_id;
  std::string primary_text;
  std::string followup_text;
  std::string formatting_suffix;
};

/// Throws ConfigError when the name or description is empty or any of the
/// ten slot questions is missing.
std::string build_primary_prompt(const SiteProfile& profile);
std::string build_followup_prompt(const SiteProfile& profile);
PromptPair build_prompts(const SiteTemplate& site);

/// The fixed wording of both templates, without any entity text.
std::string prompt_boilerplate();

}  // namespace canary
