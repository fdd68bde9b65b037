#include "doctest.h"

#include "canary/asn_database.hpp"
#include "canary/error.hpp"
#include "canary/text.hpp"
#include "test_util.hpp"

using namespace canary;

namespace {

std::uint32_t brute_force(const std::vector<AsnEntry>& entries, const IpAddress& ip) {
  int best = -1;
  std::uint32_t asn = 0;
  for (const auto& e : entries)
    if (e.prefix.contains(ip) && e.prefix.length > best) {
      best = e.prefix.length;
      asn = e.asn;
    }
  return asn;
}

IpAddress random_ip(Rng& rng, bool v6) {
  IpAddress ip;
  ip.v6 = v6;
  for (int i = 0; i < (v6 ? 16 : 4); ++i) ip.bytes[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.below(256));
  // Concentrate on a few /8s so prefixes overlap.
  ip.bytes[0] = static_cast<std::uint8_t>(v6 ? 0x20 : 10 + rng.below(3));
  return ip;
}

}  // namespace

TEST_CASE("IP and prefix parsing") {
  CHECK(IpAddress::parse("192.0.2.1").to_string() == "192.0.2.1");
  CHECK(IpAddress::parse("2001:db8::1").v6);
  CHECK(Prefix::parse("10.1.2.3/8").to_string() == "10.0.0.0/8");
  CHECK(Prefix::parse("192.0.2.7").length == 32);
  CHECK_THROWS_AS(IpAddress::parse("300.1.1.1"), InputError);
  CHECK_THROWS_AS(IpAddress::parse("not-an-ip"), InputError);
  CHECK_THROWS_AS(Prefix::parse("10.0.0.0/33"), InputError);
}

TEST_CASE("longest prefix wins") {
  AsnDatabase db;
  db.add(Prefix::parse("10.0.0.0/8"), 1);
  db.add(Prefix::parse("10.1.0.0/16"), 2);
  db.add(Prefix::parse("10.1.2.0/24"), 3);
  db.add(Prefix::parse("2001:db8::/32"), 4);
  CHECK(resolve_asn("10.9.9.9", db) == 1);
  CHECK(resolve_asn("10.1.9.9", db) == 2);
  CHECK(resolve_asn("10.1.2.200", db) == 3);
  CHECK(resolve_asn("11.0.0.1", db) == 0);
  CHECK(resolve_asn("2001:db8:ffff::1", db) == 4);
  CHECK(resolve_asn("2001:db9::1", db) == 0);
  CHECK_THROWS(db.add(Prefix::parse("10.1.0.0/16"), 9));
  CHECK_THROWS(db.add(Prefix::parse("172.16.0.0/12"), 0));
}

TEST_CASE("TSV loading skips comments and rejects garbage") {
  auto db = AsnDatabase::parse_tsv("# header\n\n192.0.2.0/24\t64496\n2001:db8::/32\t64500\n");
  CHECK(db.size() == 2);
  CHECK(resolve_asn("192.0.2.55", db) == 64496);
  CHECK_THROWS(AsnDatabase::parse_tsv("192.0.2.0/24\tnot-a-number\n"));
  CHECK_THROWS(AsnDatabase::parse_tsv("garbage\n"));
  auto shipped = AsnDatabase::load(testutil::source_dir() + "/deploy/asn.tsv");
  CHECK(resolve_asn("203.0.113.200", shipped) == 64499);
  CHECK(resolve_asn("203.0.113.5", shipped) == 64498);
}

TEST_CASE("trie agrees with a brute-force scan on random tables") {
  Rng rng(7);
  for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
    AsnDatabase db;
    std::vector<AsnEntry> entries;
    for (std::size_t i = 0; i < n; ++i) {
      bool v6 = rng.below(4) == 0;
      auto ip = random_ip(rng, v6);
      int len = static_cast<int>(v6 ? 8 + rng.below(57) : 8 + rng.below(25));
      auto p = Prefix::parse(ip.to_string() + "/" + std::to_string(len));
      bool dup = false;
      for (const auto& e : entries) dup |= e.prefix.to_string() == p.to_string();
      if (dup && n <= 1000) continue;
      try {
        db.add(p, static_cast<std::uint32_t>(1 + rng.below(400000)));
      } catch (const Error&) {
        continue;
      }
      entries.push_back(db.entries().back());
    }
    for (int q = 0; q < 2000; ++q) {
      auto ip = random_ip(rng, rng.below(4) == 0);
      REQUIRE(db.lookup(ip) == brute_force(entries, ip));
    }
  }
}

TEST_CASE("resolver swaps snapshots atomically") {
  AsnResolver r;
  auto before = r.snapshot();
  CHECK(resolve_asn("192.0.2.1", *before) == 0);
  AsnDatabase db;
  db.add(Prefix::parse("192.0.2.0/24"), 7);
  r.swap(std::move(db));
  CHECK(resolve_asn("192.0.2.1", *r.snapshot()) == 7);
  CHECK(resolve_asn("192.0.2.1", *before) == 0);
}
