#include "canary/asn_database.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <fstream>
#include <sstream>

#include "canary/error.hpp"

namespace canary {

IpAddress IpAddress::parse(std::string_view text) {
  std::string s(text);
  IpAddress ip;
  if (s.find(':') != std::string::npos) {
    // Strip an IPv6 zone id ("fe80::1%eth0").
    if (auto pct = s.find('%'); pct != std::string::npos) s.resize(pct);
    in6_addr a6{};
    if (inet_pton(AF_INET6, s.c_str(), &a6) != 1) throw InputError("malformed IP address: '" + s + "'");
    ip.v6 = true;
    std::copy(std::begin(a6.s6_addr), std::end(a6.s6_addr), ip.bytes.begin());
    return ip;
  }
  in_addr a4{};
  if (inet_pton(AF_INET, s.c_str(), &a4) != 1) throw InputError("malformed IP address: '" + s + "'");
  auto* p = reinterpret_cast<const std::uint8_t*>(&a4.s_addr);
  std::copy(p, p + 4, ip.bytes.begin());
  return ip;
}

std::string IpAddress::to_string() const {
  char buf[INET6_ADDRSTRLEN];
  if (v6) {
    in6_addr a6{};
    std::copy(bytes.begin(), bytes.end(), std::begin(a6.s6_addr));
    inet_ntop(AF_INET6, &a6, buf, sizeof buf);
  } else {
    in_addr a4{};
    std::copy(bytes.begin(), bytes.begin() + 4, reinterpret_cast<std::uint8_t*>(&a4.s_addr));
    inet_ntop(AF_INET, &a4, buf, sizeof buf);
  }
  return buf;
}

Prefix Prefix::parse(std::string_view text) {
  Prefix p;
  auto slash = text.find('/');
  p.network = IpAddress::parse(text.substr(0, slash));
  p.length = p.network.bit_width();
  if (slash != std::string_view::npos) {
    auto len = text.substr(slash + 1);
    int value = -1;
    auto [ptr, ec] = std::from_chars(len.data(), len.data() + len.size(), value);
    if (ec != std::errc{} || ptr != len.data() + len.size() || value < 0 || value > p.network.bit_width())
      throw InputError("malformed prefix length: '" + std::string(text) + "'");
    p.length = value;
  }
  for (int i = p.length; i < p.network.bit_width(); ++i)
    p.network.bytes[static_cast<std::size_t>(i / 8)] &= static_cast<std::uint8_t>(~(0x80u >> (i % 8)));
  return p;
}

bool Prefix::contains(const IpAddress& ip) const {
  if (ip.v6 != network.v6) return false;
  for (int i = 0; i < length; ++i)
    if (ip.bit(i) != network.bit(i)) return false;
  return true;
}

std::string Prefix::to_string() const { return network.to_string() + "/" + std::to_string(length); }

AsnDatabase::AsnDatabase() : v4_(1), v6_(1) {}

void AsnDatabase::add(const Prefix& prefix, std::uint32_t asn) {
  if (asn == 0) throw ConfigError("ASN must be positive for prefix " + prefix.to_string());
  auto& trie = trie_for(prefix.network.v6);
  std::size_t node = 0;
  for (int i = 0; i < prefix.length; ++i) {
    int b = prefix.network.bit(i);
    if (trie[node].child[b] < 0) {
      trie[node].child[b] = static_cast<std::int32_t>(trie.size());
      trie.emplace_back();
    }
    node = static_cast<std::size_t>(trie[node].child[b]);
  }
  if (trie[node].asn != 0) throw ConfigError("duplicate prefix " + prefix.to_string());
  trie[node].asn = asn;
  entries_.push_back({prefix, asn});
}

std::uint32_t AsnDatabase::lookup(const IpAddress& ip) const {
  const auto& trie = trie_for(ip.v6);
  std::size_t node = 0;
  std::uint32_t best = trie[0].asn;
  for (int i = 0; i < ip.bit_width(); ++i) {
    auto next = trie[node].child[ip.bit(i)];
    if (next < 0) break;
    node = static_cast<std::size_t>(next);
    if (trie[node].asn != 0) best = trie[node].asn;
  }
  return best;
}

AsnDatabase AsnDatabase::parse_tsv(std::string_view text) {
  AsnDatabase db;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    auto where = [&] { return " (line " + std::to_string(line_no) + ")"; };
    if (tab == std::string_view::npos) throw InputError("expected 'prefix<TAB>asn'" + where());
    auto asn_text = line.substr(tab + 1);
    while (!asn_text.empty() && (asn_text.front() == ' ' || asn_text.front() == '\t')) asn_text.remove_prefix(1);
    if (asn_text.size() > 2 && (asn_text.substr(0, 2) == "AS" || asn_text.substr(0, 2) == "as"))
      asn_text.remove_prefix(2);
    std::uint32_t asn = 0;
    auto [ptr, ec] = std::from_chars(asn_text.data(), asn_text.data() + asn_text.size(), asn);
    if (ec != std::errc{} || ptr != asn_text.data() + asn_text.size()) throw InputError("malformed ASN" + where());
    try {
      db.add(Prefix::parse(line.substr(0, tab)), asn);
    } catch (const Error& e) {
      throw ConfigError(e.what() + where());
    }
  }
  return db;
}

AsnDatabase AsnDatabase::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open ASN database " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tsv(ss.str());
}

std::uint32_t resolve_asn(std::string_view ip, const AsnDatabase& db) { return db.lookup(IpAddress::parse(ip)); }

}  // namespace canary
