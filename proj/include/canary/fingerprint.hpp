#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "canary/asn_database.hpp"

namespace canary {

/// Reporting label for a raw User-Agent string.
struct UserAgentInfo {
  std::string raw;
  std::string family;  // never empty; "unknown" when nothing matched
  std::optional<std::string> version;
};

/// Ordered rule table: declared bot tokens first, then app/browser shells,
/// then generic crawler tokens, then the first product token.
UserAgentInfo parse_user_agent(std::string_view raw);

/// Identity of a visitor. Two visitors with the same raw User-Agent and the
/// same ASN are the same scraper.
struct ScraperFingerprint {
  std::string user_agent;
  std::uint32_t asn = 0;  // 0 = unresolved

  auto operator<=>(const ScraperFingerprint&) const = default;
  bool operator==(const ScraperFingerprint&) const = default;

  /// Stable across processes and platforms.
  std::uint64_t stable_hash() const;
  std::string to_string() const;
};

struct RequestMeta {
  std::string source_ip;
  std::string user_agent;
};

ScraperFingerprint fingerprint_of(const RequestMeta& meta, const AsnDatabase& db);

}  // namespace canary

template <>
struct std::hash<canary::ScraperFingerprint> {
  std::size_t operator()(const canary::ScraperFingerprint& f) const noexcept {
    return static_cast<std::size_t>(f.stable_hash());
  }
};
