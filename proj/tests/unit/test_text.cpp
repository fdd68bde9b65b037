#include "doctest.h"

#include <set>

#include "canary/text.hpp"

using namespace canary;

TEST_CASE("comparison key folds case and whitespace") {
  CHECK(comparison_key("  West\t Port \n") == "west port");
  CHECK(comparison_key("ALDER") == "alder");
  CHECK(comparison_key("") == "");
}

TEST_CASE("word-boundary matching") {
  CHECK(boundary_match_at("west port", 5, "port"));
  CHECK_FALSE(boundary_match_at("portland", 0, "port"));
  CHECK_FALSE(boundary_match_at("airport", 3, "port"));
  CHECK(boundary_match_at("(port)", 1, "port"));
  CHECK(contains_at_boundary("the port of call", "port"));
  CHECK_FALSE(contains_at_boundary("passport control", "port"));
  CHECK_FALSE(contains_at_boundary("anything", ""));
}

TEST_CASE("boundary spans of a multi-word value") {
  auto spans = boundary_spans("west port harbor");
  std::set<std::string> got(spans.begin(), spans.end());
  CHECK(got.contains("west"));
  CHECK(got.contains("port"));
  CHECK(got.contains("west port"));
  CHECK(got.contains("port harbor"));
  CHECK_FALSE(got.contains("west port harbor"));
}

TEST_CASE("FNV-1a matches the published 64-bit test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("Rng::below stays in range and covers it") {
  Rng rng(42);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    auto v = rng.below(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  for (int c : seen) CHECK(c > 800);
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}
