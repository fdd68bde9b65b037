#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "canary/text.hpp"

namespace canary {

enum class SpaceKind { Word, GivenName, PlaceName, OrgName, Number, Date, Phone };

std::string_view to_string(SpaceKind kind);
SpaceKind parse_space_kind(std::string_view text);

/// Number, date and phone spaces; hits on these are numerically confusable.
constexpr bool is_numeric_kind(SpaceKind k) { return k == SpaceKind::Number || k == SpaceKind::Date || k == SpaceKind::Phone; }

constexpr std::uint64_t kDefaultMinCardinality = 1000;

/// Explicit values; duplicates under comparison_key are dropped.
struct ListSource {
  std::vector<std::string> values;
};
/// Cartesian product of part lists joined by `separator` ("Ash"+"ford").
struct PartsSource {
  std::vector<std::vector<std::string>> parts;
  std::string separator;
};
/// Each 'X' in the pattern is an independent decimal digit ("555-XXX-XXXX").
struct DigitPatternSource {
  std::string pattern;
};
/// Integers in [low, high].
struct IntegerRangeSource {
  std::int64_t low = 0;
  std::int64_t high = 0;
};
/// Calendar days in [first, last], rendered YYYY-MM-DD.
struct DateRangeSource {
  std::string first;
  std::string last;
};

using SpaceSource = std::variant<ListSource, PartsSource, DigitPatternSource, IntegerRangeSource, DateRangeSource>;

struct ValueSpaceSpec {
  std::string id;
  SpaceKind kind = SpaceKind::Word;
  SpaceSource source;
  std::uint64_t min_cardinality = kDefaultMinCardinality;
};

/// An enumerable canary value set. Every value has an index in
/// [0, cardinality); sampling draws an index uniformly.
class ValueSpace {
 public:
  const std::string& id() const { return id_; }
  SpaceKind kind() const { return kind_; }
  std::uint64_t cardinality() const { return cardinality_; }

  std::string value_at(std::uint64_t index) const;
  /// Index of `value` (compared by comparison_key), if it belongs here.
  std::optional<std::uint64_t> index_of(std::string_view value) const;
  bool contains(std::string_view value) const { return index_of(value).has_value(); }
  std::string sample(Rng& rng) const { return value_at(rng.below(cardinality_)); }

 private:
  friend ValueSpace build_value_space(const ValueSpaceSpec& spec);

  std::string id_;
  SpaceKind kind_ = SpaceKind::Word;
  std::uint64_t cardinality_ = 0;
  // Materialized for list and parts sources.
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::uint64_t> index_;
  // Rule-backed sources.
  std::string pattern_;
  std::int64_t low_ = 0;
  std::int64_t first_day_ = 0;  // days since 1970-01-01
  enum class Rule { Listed, Digits, Integers, Dates } rule_ = Rule::Listed;
};

/// Throws ConfigError when the source yields fewer than min_cardinality
/// distinct values or is malformed.
ValueSpace build_value_space(const ValueSpaceSpec& spec);

/// (1/space_size)^k under independent uniform draws.
double collision_probability(std::uint64_t space_size, unsigned k_tokens);

}  // namespace canary
