#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace canary {

struct IpAddress {
  bool v6 = false;
  std::array<std::uint8_t, 16> bytes{};  // IPv4 uses the first 4

  /// Throws InputError on malformed literals.
  static IpAddress parse(std::string_view text);
  int bit_width() const { return v6 ? 128 : 32; }
  bool bit(int i) const { return (bytes[static_cast<std::size_t>(i / 8)] >> (7 - i % 8)) & 1; }
  std::string to_string() const;
  bool operator==(const IpAddress&) const = default;
};

struct Prefix {
  IpAddress network;  // host bits cleared
  int length = 0;

  /// "10.0.0.0/8", "2001:db8::/32". A bare address means a host route.
  static Prefix parse(std::string_view text);
  bool contains(const IpAddress& ip) const;
  std::string to_string() const;
};

struct AsnEntry {
  Prefix prefix;
  std::uint32_t asn = 0;
};

/// Longest-prefix-match table from IP prefixes to ASNs, one binary trie per
/// address family. Immutable once built, so concurrent lookups are safe.
class AsnDatabase {
 public:
  AsnDatabase();

  /// Rejects a prefix identical to one already present and ASN 0.
  void add(const Prefix& prefix, std::uint32_t asn);

  /// ASN of the longest matching prefix, or 0.
  std::uint32_t lookup(const IpAddress& ip) const;

  const std::vector<AsnEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// `prefix<TAB>asn` per line; blank lines and `#` comments ignored.
  static AsnDatabase parse_tsv(std::string_view text);
  static AsnDatabase load(const std::filesystem::path& path);

 private:
  struct Node {
    std::int32_t child[2] = {-1, -1};
    std::uint32_t asn = 0;  // 0 = no prefix ends here
  };
  std::vector<Node>& trie_for(bool v6) { return v6 ? v6_ : v4_; }
  const std::vector<Node>& trie_for(bool v6) const { return v6 ? v6_ : v4_; }

  std::vector<Node> v4_, v6_;
  std::vector<AsnEntry> entries_;
};

/// Throws InputError for malformed IP literals.
std::uint32_t resolve_asn(std::string_view ip, const AsnDatabase& db);

/// Shared handle for readers while an operator reloads the file.
class AsnResolver {
 public:
  explicit AsnResolver(AsnDatabase db = {}) : db_(std::make_shared<const AsnDatabase>(std::move(db))) {}

  std::shared_ptr<const AsnDatabase> snapshot() const {
    std::lock_guard lock(mu_);
    return db_;
  }
  void swap(AsnDatabase db) {
    auto next = std::make_shared<const AsnDatabase>(std::move(db));
    std::lock_guard lock(mu_);
    db_ = std::move(next);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const AsnDatabase> db_;
};

}  // namespace canary
