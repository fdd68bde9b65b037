#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "canary/token_store.hpp"

namespace canary {

enum class SiteCondition { Online, Offline, RobotsBlocked };

std::string_view to_string(SiteCondition c);
/// "online", "offline", "robots-blocked" (also "blocked").
SiteCondition parse_site_condition(std::string_view text);

struct SlotProfile {
  std::string question;
  std::string space_id;
};

struct SiteProfile {
  std::string entity_name;
  std::string entity_description;
  std::map<int, SlotProfile> slots;  // 1..10
  std::vector<std::string> hosts;
};

/// A page split at its placeholders: literal text alternating with slot
/// references.
struct CompiledPage {
  struct Part {
    std::string literal;  // used when slot == 0
    int slot = 0;
  };
  std::vector<Part> parts;

  static CompiledPage compile(std::string_view text);
  std::string render(const std::map<int, std::string>& values) const;
};

class SiteTemplate {
 public:
  SiteTemplate(std::string site_id, std::map<std::string, std::string> pages, SiteProfile profile);

  const std::string& site_id() const { return site_id_; }
  const SiteProfile& profile() const { return profile_; }
  const std::map<std::string, std::string>& pages() const { return pages_; }

  /// "/", "/index.html", "/about", "/about.html" and "/team/" style paths
  /// resolve to a page key; nullopt when no page matches.
  std::optional<std::string> resolve(std::string_view path) const;

  /// Throws NotFoundError for unknown paths and InputError when the
  /// assignment belongs to another site.
  std::string render(const TokenAssignment& a, std::string_view path) const;

  /// Inverse of render: pulls slot values back out of a rendered page by
  /// aligning it with the page's literal text. An injected interlink block
  /// is skipped.
  std::optional<std::map<int, std::string>> recover_values(std::string_view path, std::string_view page_text) const;

  /// Every literal the site publishes outside the placeholders: page prose,
  /// profile fields and questions. Token draws avoid this text.
  std::string static_text() const;

  std::map<int, std::string> slot_spaces() const;

 private:
  std::string site_id_;
  std::map<std::string, std::string> pages_;
  std::map<std::string, CompiledPage> compiled_;
  SiteProfile profile_;
};

/// Reads `<dir>/profile.toml` and every `<dir>/pages/**.html`; the site id
/// is the directory name.
SiteTemplate load_site_template(const std::filesystem::path& dir);
/// One site per subdirectory of `root`, sorted by id.
std::vector<SiteTemplate> load_site_templates(const std::filesystem::path& root);
SiteProfile parse_site_profile(std::string_view toml_text, const std::string& origin);

std::string render_site(const SiteTemplate& t, const TokenAssignment& a, std::string_view path);

/// Body of /robots.txt; nullopt means the server answers 404.
std::optional<std::string> robots_txt(SiteCondition condition);

inline constexpr std::string_view kRobotsDisallowAll = "User-agent: *\nDisallow: /\n";
inline constexpr std::string_view kInterlinkMarker = "<!-- canary:interlinks -->";

/// Adds one off-screen anchor per peer before </body> (or at the end). A
/// page that already carries the marker is returned unchanged.
std::string inject_hidden_links(std::string_view page, const std::vector<std::string>& peer_urls);

}  // namespace canary
