#include "canary/value_space.hpp"

#include <chrono>
#include <cmath>
#include <cctype>
#include <cstdio>

#include "canary/error.hpp"
#include "canary/time.hpp"

namespace canary {

namespace chr = std::chrono;

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Word: return "word";
    case SpaceKind::GivenName: return "given-name";
    case SpaceKind::PlaceName: return "place-name";
    case SpaceKind::OrgName: return "org-name";
    case SpaceKind::Number: return "number";
    case SpaceKind::Date: return "date";
    case SpaceKind::Phone: return "phone";
  }
  return "word";
}

SpaceKind parse_space_kind(std::string_view text) {
  for (auto k : {SpaceKind::Word, SpaceKind::GivenName, SpaceKind::PlaceName, SpaceKind::OrgName, SpaceKind::Number,
                 SpaceKind::Date, SpaceKind::Phone})
    if (to_string(k) == text) return k;
  throw ConfigError("unknown value space kind '" + std::string(text) + "'");
}

namespace {

std::int64_t day_number(const std::string& date) {
  auto ts = parse_rfc3339(date);
  return chr::floor<chr::days>(ts).time_since_epoch().count();
}

void add_listed(std::vector<std::string>& values, std::unordered_map<std::string, std::uint64_t>& index, std::string v) {
  auto key = comparison_key(v);
  if (key.empty()) return;
  if (index.emplace(key, values.size()).second) values.push_back(collapse_whitespace(v));
}

}  // namespace

ValueSpace build_value_space(const ValueSpaceSpec& spec) {
  ValueSpace s;
  s.id_ = spec.id;
  s.kind_ = spec.kind;
  if (spec.id.empty()) throw ConfigError("value space needs an id");

  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, ListSource>) {
          for (const auto& v : src.values) add_listed(s.values_, s.index_, v);
          s.cardinality_ = s.values_.size();
        } else if constexpr (std::is_same_v<T, PartsSource>) {
          if (src.parts.empty()) throw ConfigError("space '" + spec.id + "': parts rule needs at least one part list");
          std::uint64_t total = 1;
          for (const auto& p : src.parts) {
            if (p.empty()) throw ConfigError("space '" + spec.id + "': empty part list");
            total *= p.size();
            if (total > 5'000'000) throw ConfigError("space '" + spec.id + "': parts rule too large to enumerate");
          }
          std::vector<std::size_t> idx(src.parts.size(), 0);
          for (std::uint64_t n = 0; n < total; ++n) {
            std::string v;
            for (std::size_t i = 0; i < idx.size(); ++i) {
              if (i) v += src.separator;
              v += src.parts[i][idx[i]];
            }
            add_listed(s.values_, s.index_, std::move(v));
            for (std::size_t i = idx.size(); i-- > 0;) {
              if (++idx[i] < src.parts[i].size()) break;
              idx[i] = 0;
            }
          }
          s.cardinality_ = s.values_.size();
        } else if constexpr (std::is_same_v<T, DigitPatternSource>) {
          std::uint64_t total = 1;
          int xs = 0;
          for (char c : src.pattern)
            if (c == 'X') {
              ++xs;
              total *= 10;
            }
          if (xs == 0 || xs > 18) throw ConfigError("space '" + spec.id + "': digit pattern needs 1..18 'X'");
          s.rule_ = ValueSpace::Rule::Digits;
          s.pattern_ = src.pattern;
          s.cardinality_ = total;
        } else if constexpr (std::is_same_v<T, IntegerRangeSource>) {
          if (src.high < src.low) throw ConfigError("space '" + spec.id + "': empty integer range");
          s.rule_ = ValueSpace::Rule::Integers;
          s.low_ = src.low;
          s.cardinality_ = static_cast<std::uint64_t>(src.high - src.low) + 1;
        } else {
          std::int64_t first, last;
          try {
            first = day_number(src.first);
            last = day_number(src.last);
          } catch (const InputError& e) {
            throw ConfigError("space '" + spec.id + "': " + e.what());
          }
          if (last < first) throw ConfigError("space '" + spec.id + "': empty date range");
          s.rule_ = ValueSpace::Rule::Dates;
          s.first_day_ = first;
          s.cardinality_ = static_cast<std::uint64_t>(last - first) + 1;
        }
      },
      spec.source);

  if (s.cardinality_ < spec.min_cardinality)
    throw ConfigError("space '" + spec.id + "' has " + std::to_string(s.cardinality_) + " values, below the minimum " +
                      std::to_string(spec.min_cardinality));
  return s;
}

std::string ValueSpace::value_at(std::uint64_t index) const {
  switch (rule_) {
    case Rule::Listed: return values_.at(index);
    case Rule::Integers: return std::to_string(low_ + static_cast<std::int64_t>(index));
    case Rule::Digits: {
      std::string out = pattern_;
      for (std::size_t i = out.size(); i-- > 0;)
        if (out[i] == 'X') {
          out[i] = static_cast<char>('0' + index % 10);
          index /= 10;
        }
      return out;
    }
    case Rule::Dates: {
      chr::year_month_day ymd{chr::sys_days{chr::days{first_day_ + static_cast<std::int64_t>(index)}}};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()));
      return buf;
    }
  }
  return {};
}

std::optional<std::uint64_t> ValueSpace::index_of(std::string_view value) const {
  auto key = comparison_key(value);
  switch (rule_) {
    case Rule::Listed: {
      auto it = index_.find(key);
      if (it == index_.end()) return std::nullopt;
      return it->second;
    }
    case Rule::Integers: {
      if (key.empty()) return std::nullopt;
      std::int64_t v = 0;
      std::size_t i = key[0] == '-' ? 1 : 0;
      if (i == key.size()) return std::nullopt;
      for (; i < key.size(); ++i) {
        if (key[i] < '0' || key[i] > '9') return std::nullopt;
        v = v * 10 + (key[i] - '0');
      }
      if (key[0] == '-') v = -v;
      if (v < low_ || static_cast<std::uint64_t>(v - low_) >= cardinality_) return std::nullopt;
      // Reject non-canonical spellings like "007".
      if (value_at(static_cast<std::uint64_t>(v - low_)) != key) return std::nullopt;
      return static_cast<std::uint64_t>(v - low_);
    }
    case Rule::Digits: {
      if (key.size() != pattern_.size()) return std::nullopt;
      std::uint64_t idx = 0;
      for (std::size_t i = 0; i < key.size(); ++i) {
        char p = static_cast<char>(std::tolower(static_cast<unsigned char>(pattern_[i])));
        if (pattern_[i] == 'X') {
          if (key[i] < '0' || key[i] > '9') return std::nullopt;
          idx = idx * 10 + static_cast<std::uint64_t>(key[i] - '0');
        } else if (key[i] != p) {
          return std::nullopt;
        }
      }
      return idx;
    }
    case Rule::Dates: {
      try {
        if (key.size() != 10) return std::nullopt;
        auto day = day_number(key) - first_day_;
        if (day < 0 || static_cast<std::uint64_t>(day) >= cardinality_) return std::nullopt;
        return static_cast<std::uint64_t>(day);
      } catch (const InputError&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

double collision_probability(std::uint64_t space_size, unsigned k_tokens) {
  if (space_size == 0) throw InputError("space size must be positive");
  return std::pow(1.0 / static_cast<double>(space_size), static_cast<double>(k_tokens));
}

}  // namespace canary
