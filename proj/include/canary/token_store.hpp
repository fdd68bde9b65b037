#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "canary/fingerprint.hpp"
#include "canary/time.hpp"
#include "canary/value_space.hpp"

namespace canary {

inline constexpr int kSlotsPerSite = 10;

/// "CT1".."CT10".
std::string slot_name(int slot_id);

struct TokenSlot {
  std::string site_id;
  int slot_id = 0;  // 1..10
  std::string space_id;
};

struct SlotBinding {
  std::string space_id;
  SpaceKind kind = SpaceKind::Word;
};

struct TokenAssignment {
  std::string site_id;
  ScraperFingerprint fingerprint;
  std::map<int, std::string> values;  // slot_id -> value, all 10 slots
  Timestamp created_at{};

  bool operator==(const TokenAssignment&) const = default;
};

/// Which earlier values a fresh draw must avoid. `Slot` avoids values other
/// fingerprints hold in the same (site, slot); `Site` avoids every value on
/// the site; `Store` avoids every value anywhere.
enum class ExclusionScope { Slot, Site, Store };

ExclusionScope parse_exclusion_scope(std::string_view text);

struct TokenPolicy {
  ExclusionScope scope = ExclusionScope::Slot;
  std::string secret_key = "canary";
};

/// Assignment store: get-or-create per (site, fingerprint), persisted as an
/// append-only JSON Lines log plus a compacted snapshot.
///
/// Layout of a store directory:
///   assignments.log  one record per line ("binding" or "assignment")
///   index.json       snapshot of every record up to `log_offset`
class TokenStore {
 public:
  /// Volatile store; nothing touches disk.
  explicit TokenStore(TokenPolicy policy = {});
  /// Opens (creating if needed) a store directory and replays it.
  TokenStore(const std::filesystem::path& dir, TokenPolicy policy);
  ~TokenStore();

  TokenStore(const TokenStore&) = delete;
  TokenStore& operator=(const TokenStore&) = delete;

  void register_space(ValueSpace space);
  const ValueSpace* space(const std::string& id) const;

  /// Binds a site's ten slots to spaces. `reserved_text` is the site's
  /// static wording (profile, prompts, page prose); no generated value may
  /// occur in it at word boundaries, so prompts can never carry tokens.
  /// Rebinding a slot that already has assignments to another space is a
  /// ConfigError.
  void register_site(const std::string& site_id, const std::map<int, std::string>& slot_spaces,
                     std::string reserved_text = {});

  /// Extra text every site's draws must avoid (shared prompt wording).
  void add_global_reserved_text(std::string_view text);

  std::optional<SlotBinding> binding(const std::string& site_id, int slot_id) const;
  std::vector<std::string> sites() const;

  struct Lookup {
    TokenAssignment assignment;
    bool created = false;
  };

  /// Returns the stored assignment, or draws, persists and returns a new
  /// one. Concurrent first calls for one key agree on a single winner.
  /// Throws NotFoundError for unregistered sites and CapacityError when a
  /// slot's space has no admissible value left.
  Lookup get_or_create(const std::string& site_id, const ScraperFingerprint& fp, Timestamp now);

  std::optional<TokenAssignment> find(const std::string& site_id, const ScraperFingerprint& fp) const;

  /// Inserts a record verbatim, skipping exclusion checks (legacy data).
  void import_assignment(const TokenAssignment& a);

  /// All assignments ordered by (site_id, fingerprint).
  std::vector<TokenAssignment> assignments() const;
  std::size_t size() const;

  /// Rewrites index.json to cover the whole log.
  void compact();

  const std::filesystem::path& directory() const { return dir_; }

 private:
  using Key = std::pair<std::string, ScraperFingerprint>;

  std::string draw_value(const std::string& site_id, int slot_id, const ScraperFingerprint& fp,
                         const ValueSpace& space) const;
  bool admissible(const std::string& site_id, int slot_id, const std::string& key) const;
  void index_values(const TokenAssignment& a);
  void append_line(const std::string& line);
  void apply_record(const std::string& line);
  void load();

  TokenPolicy policy_;
  std::filesystem::path dir_;
  std::ofstream log_;

  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, ValueSpace> spaces_;
  std::map<std::string, std::map<int, SlotBinding>> bindings_;
  std::map<std::string, std::string> reserved_;  // site -> lowercased static text
  std::string global_reserved_;
  std::map<Key, TokenAssignment> assignments_;
  // Comparison keys already drawn, bucketed per exclusion scope.
  std::unordered_map<std::string, std::unordered_set<std::string>> used_;
};

/// Export record: site_id, user_agent, asn, CT1..CT10, created_at.
std::string export_assignment_json(const TokenAssignment& a);

}  // namespace canary
