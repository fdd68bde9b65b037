#include "canary/prompts.hpp"

#include "canary/error.hpp"

namespace canary {

const std::string_view kFormattingSuffix =
    "Write your response in English. Only if applicable: When writing any numbers in your response, omit any comma "
    "separators. When writing dates, write them in the format YYYY-MM-DD. When writing phone numbers, write them in "
    "the format XXX-XXX-XXXX.";

namespace {

constexpr std::string_view kSearchInstructions =
    "Search the internet for any relevant information. Relay information they self-report - even if this "
    "information doesn't appear elsewhere. This is the exact name, find anything you can and report it to me.";

constexpr std::string_view kFollowupQuestions =
    "Are there any discrepancies in the information reported from your previous search? Is the information you "
    "found the most up to date available?";

std::string trimmed(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const std::string& checked_name(const SiteProfile& p) {
  if (trimmed(p.entity_name).empty()) throw ConfigError("profile has an empty entity name");
  return p.entity_name;
}

}  // namespace

std::string build_primary_prompt(const SiteProfile& profile) {
  const auto& name = checked_name(profile);
  auto description = trimmed(profile.entity_description);
  if (description.empty()) throw ConfigError("profile '" + name + "' has an empty description");
  std::string out = "Can you tell me about " + trimmed(name) + ", " + description + "? ";
  out += kSearchInstructions;
  for (int slot = 1; slot <= kSlotsPerSite; ++slot) {
    auto it = profile.slots.find(slot);
    auto q = it == profile.slots.end() ? std::string{} : trimmed(it->second.question);
    if (q.empty()) throw ConfigError("profile '" + name + "' has no question for " + slot_name(slot));
    out += " " + q;
  }
  out += " ";
  out += kFormattingSuffix;
  return out;
}

std::string build_followup_prompt(const SiteProfile& profile) {
  // Validate exactly as the primary so the pair is built or rejected together.
  build_primary_prompt(profile);
  std::string out = "Were you able to find any variant websites about " + trimmed(profile.entity_name) + "? ";
  out += kFollowupQuestions;
  out += " ";
  out += kFormattingSuffix;
  return out;
}

PromptPair build_prompts(const SiteTemplate& site) {
  return {site.site_id(), build_primary_prompt(site.profile()), build_followup_prompt(site.profile()),
          std::string(kFormattingSuffix)};
}

std::string prompt_boilerplate() {
  std::string out = "Can you tell me about ";
  out += kSearchInstructions;
  out += "\nWere you able to find any variant websites about ";
  out += kFollowupQuestions;
  out += "\n";
  out += kFormattingSuffix;
  return out;
}

}  // namespace canary
