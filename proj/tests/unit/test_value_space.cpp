#include "doctest.h"

#include <cmath>
#include <set>

#include "canary/builtin_spaces.hpp"
#include "canary/error.hpp"
#include "canary/value_space.hpp"

using namespace canary;

namespace {

const ValueSpaceSpec& builtin(const std::vector<ValueSpaceSpec>& specs, const std::string& id) {
  for (const auto& s : specs)
    if (s.id == id) return s;
  throw std::runtime_error("no builtin " + id);
}

}  // namespace

TEST_CASE("builtin spaces meet the minimum cardinality") {
  auto specs = builtin_space_specs();
  CHECK(specs.size() == 8);
  for (const auto& spec : specs) {
    CAPTURE(spec.id);
    auto s = build_value_space(spec);
    CHECK(s.cardinality() >= kDefaultMinCardinality);
  }
  CHECK(build_value_space(builtin(specs, "place-name")).cardinality() == 4761);
  CHECK(build_value_space(builtin(specs, "phone")).cardinality() == 10'000'000);
}

TEST_CASE("index_of inverts value_at") {
  for (const auto& spec : builtin_space_specs()) {
    auto s = build_value_space(spec);
    CAPTURE(spec.id);
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      auto idx = rng.below(s.cardinality());
      auto v = s.value_at(idx);
      REQUIRE(s.index_of(v) == idx);
      REQUIRE(s.index_of(ascii_lower(v)) == idx);
    }
  }
}

TEST_CASE("listed values are distinct under the comparison key") {
  auto s = build_value_space(builtin(builtin_space_specs(), "place-name"));
  std::set<std::string> keys;
  for (std::uint64_t i = 0; i < s.cardinality(); ++i) keys.insert(comparison_key(s.value_at(i)));
  CHECK(keys.size() == s.cardinality());
}

TEST_CASE("rule-backed spaces") {
  auto phone = build_value_space({"p", SpaceKind::Phone, DigitPatternSource{"555-XXX-XXXX"}});
  CHECK(phone.value_at(0) == "555-000-0000");
  CHECK(phone.value_at(1234567) == "555-123-4567");
  CHECK(phone.contains("555-999-9999"));
  CHECK_FALSE(phone.contains("556-999-9999"));
  CHECK_FALSE(phone.contains("555-99-99999"));

  auto num = build_value_space({"n", SpaceKind::Number, IntegerRangeSource{1000, 1999}});
  CHECK(num.cardinality() == 1000);
  CHECK(num.value_at(5) == "1005");
  CHECK(num.contains("1999"));
  CHECK_FALSE(num.contains("2000"));
  CHECK_FALSE(num.contains("01000"));

  auto date = build_value_space({"d", SpaceKind::Date, DateRangeSource{"2000-01-01", "2003-12-31"}});
  CHECK(date.cardinality() == 1461);
  CHECK(date.value_at(0) == "2000-01-01");
  CHECK(date.value_at(59) == "2000-02-29");
  CHECK(date.index_of("2003-12-31") == 1460);
  CHECK_FALSE(date.contains("2004-01-01"));
}

TEST_CASE("spaces below the minimum are rejected") {
  CHECK_THROWS_AS(build_value_space({"n", SpaceKind::Number, IntegerRangeSource{1, 999}}), ConfigError);
  CHECK_NOTHROW(build_value_space({"n", SpaceKind::Number, IntegerRangeSource{1, 1000}}));
  CHECK_NOTHROW(build_value_space({"n", SpaceKind::Number, IntegerRangeSource{1, 9}, 0}));
  CHECK_THROWS_AS(build_value_space({"w", SpaceKind::Word, ListSource{{"a", "A", "b"}}, 3}), ConfigError);
  CHECK_THROWS_AS(build_value_space({"", SpaceKind::Word, ListSource{{"a"}}, 0}), ConfigError);
  CHECK_THROWS_AS(build_value_space({"x", SpaceKind::Phone, DigitPatternSource{"555"}, 0}), ConfigError);
  CHECK_THROWS_AS(parse_space_kind("colour"), ConfigError);
}

TEST_CASE("collision probability") {
  CHECK(collision_probability(1000, 1) == doctest::Approx(1e-3));
  CHECK(collision_probability(1000, 2) == doctest::Approx(1e-6));
  CHECK(collision_probability(4761, 10) == doctest::Approx(std::pow(1.0 / 4761, 10)));
  CHECK_THROWS(collision_probability(0, 1));
}
