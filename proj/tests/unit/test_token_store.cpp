#include "doctest.h"

#include <set>

#include "canary/error.hpp"
#include "canary/token_store.hpp"
#include "test_util.hpp"

using namespace canary;

namespace {

const Timestamp kNow = parse_rfc3339("2025-03-01T00:00:00Z");

ScraperFingerprint fp(int i) { return {"Agent/" + std::to_string(i), static_cast<std::uint32_t>(64500 + i % 7)}; }

}  // namespace

TEST_CASE("get_or_create is stable per key and fills all slots") {
  TokenStore store;
  testutil::register_builtins(store);
  store.register_site("a", testutil::default_slots());
  auto first = store.get_or_create("a", fp(1), kNow);
  CHECK(first.created);
  CHECK(first.assignment.values.size() == kSlotsPerSite);
  for (int i = 0; i < 100; ++i) {
    auto again = store.get_or_create("a", fp(1), kNow + days(i));
    CHECK_FALSE(again.created);
    CHECK(again.assignment == first.assignment);
  }
  CHECK(store.size() == 1);
}

TEST_CASE("distinct fingerprints get disjoint values per slot") {
  TokenStore store;
  testutil::register_builtins(store);
  store.register_site("a", testutil::default_slots());
  std::map<int, std::set<std::string>> seen;
  for (int i = 0; i < 300; ++i) {
    auto a = store.get_or_create("a", fp(i), kNow).assignment;
    for (const auto& [slot, v] : a.values) REQUIRE(seen[slot].insert(comparison_key(v)).second);
  }
}

TEST_CASE("draws are deterministic given the secret") {
  auto run = [](const std::string& secret) {
    TokenStore store(TokenPolicy{ExclusionScope::Slot, secret});
    testutil::register_builtins(store);
    store.register_site("a", testutil::default_slots());
    return store.get_or_create("a", fp(3), kNow).assignment.values;
  };
  CHECK(run("k1") == run("k1"));
  CHECK(run("k1") != run("k2"));
}

TEST_CASE("site and store scopes exclude wider") {
  TokenStore store(TokenPolicy{ExclusionScope::Store, "s"});
  store.register_space(build_value_space({"tiny", SpaceKind::Number, IntegerRangeSource{1, 40}, 0}));
  store.register_site("a", testutil::uniform_slots("tiny"));
  store.register_site("b", testutil::uniform_slots("tiny"));
  std::set<std::string> all;
  for (const auto* site : {"a", "b"})
    for (int i = 0; i < 2; ++i)
      for (const auto& [_, v] : store.get_or_create(site, fp(i), kNow).assignment.values) CHECK(all.insert(v).second);
  CHECK(all.size() == 40);
  CHECK_THROWS_AS(store.get_or_create("a", fp(9), kNow), CapacityError);
}

TEST_CASE("capacity error on a two-value space") {
  TokenStore store;
  store.register_space(build_value_space({"two", SpaceKind::Word, ListSource{{"Alpha", "Beta"}}, 0}));
  store.register_site("a", testutil::uniform_slots("two"));
  CHECK_NOTHROW(store.get_or_create("a", fp(1), kNow));
  CHECK_NOTHROW(store.get_or_create("a", fp(2), kNow));
  CHECK_THROWS_AS(store.get_or_create("a", fp(3), kNow), CapacityError);
  CHECK(store.size() == 2);
}

TEST_CASE("reserved text is never drawn") {
  TokenStore store;
  store.register_space(
      build_value_space({"w", SpaceKind::Word, ListSource{{"Harbor", "Meadow", "Lantern", "Orchard"}}, 0}));
  store.register_site("a", testutil::uniform_slots("w"), "Welcome to the harbor and the meadow.");
  store.add_global_reserved_text("Tell me about the lantern");
  CHECK(store.get_or_create("a", fp(1), kNow).assignment.values.at(1) == "Orchard");
  CHECK_THROWS_AS(store.get_or_create("a", fp(2), kNow), CapacityError);
}

TEST_CASE("unknown sites and bad bindings") {
  TokenStore store;
  testutil::register_builtins(store);
  CHECK_THROWS_AS(store.get_or_create("nope", fp(1), kNow), NotFoundError);
  CHECK_THROWS_AS(store.register_site("a", {{1, "title"}}), ConfigError);
  CHECK_THROWS_AS(store.register_site("a", testutil::uniform_slots("missing")), ConfigError);
  store.register_site("a", testutil::default_slots());
  store.get_or_create("a", fp(1), kNow);
  CHECK_NOTHROW(store.register_site("a", testutil::default_slots()));
  CHECK_THROWS_AS(store.register_site("a", testutil::uniform_slots("title")), ConfigError);
  CHECK_THROWS_AS(parse_exclusion_scope("global"), ConfigError);
}

TEST_CASE("persistence replays the log and the snapshot") {
  testutil::TempDir dir;
  std::vector<TokenAssignment> made;
  {
    TokenStore store(dir.path(), {});
    testutil::register_builtins(store);
    store.register_site("a", testutil::default_slots());
    for (int i = 0; i < 20; ++i) made.push_back(store.get_or_create("a", fp(i), kNow).assignment);
    store.compact();
    for (int i = 20; i < 30; ++i) made.push_back(store.get_or_create("a", fp(i), kNow).assignment);
  }
  TokenStore reopened(dir.path(), {});
  testutil::register_builtins(reopened);
  CHECK(reopened.size() == 30);
  for (const auto& a : made) {
    auto got = reopened.find("a", a.fingerprint);
    REQUIRE(got);
    CHECK(*got == a);
    CHECK_FALSE(reopened.get_or_create("a", a.fingerprint, kNow).created);
  }
  CHECK(reopened.binding("a", 10)->kind == SpaceKind::Phone);
  // Replayed values still block fresh draws.
  auto fresh = reopened.get_or_create("a", fp(99), kNow).assignment;
  for (const auto& a : made)
    for (const auto& [slot, v] : a.values) CHECK(comparison_key(fresh.values.at(slot)) != comparison_key(v));
}

TEST_CASE("a torn final log line is dropped, a torn middle line is corruption") {
  testutil::TempDir dir;
  {
    TokenStore store(dir.path(), {});
    testutil::register_builtins(store);
    store.register_site("a", testutil::default_slots());
    store.get_or_create("a", fp(1), kNow);
  }
  auto log = dir / "assignments.log";
  auto good = testutil::slurp(log);
  testutil::spit(log, good + "{\"type\":\"assignment\",\"site_id\":\"a\",\"us");
  {
    TokenStore store(dir.path(), {});
    CHECK(store.size() == 1);
  }
  testutil::spit(log, good + "{\"type\":\"assign\n" + good);
  CHECK_THROWS_AS(TokenStore(dir.path(), {}), DataIntegrityError);
}

TEST_CASE("export record lists every slot") {
  TokenAssignment a{"a", {"UA \"x\"", 7}, {{1, "Alpha"}}, kNow};
  auto line = export_assignment_json(a);
  CHECK(line.find("\"CT1\":\"Alpha\"") != std::string::npos);
  CHECK(line.find("\"CT10\":null") != std::string::npos);
  CHECK(line.find("\"asn\":7") != std::string::npos);
}
