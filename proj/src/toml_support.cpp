#include "toml_support.hpp"

#include <fstream>
#include <sstream>

#include "canary/error.hpp"

namespace canary::tomlu {

toml::table parse(std::string_view text, const std::string& origin) {
  try {
    return toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << origin << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(msg.str());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> strings(View node, const std::string& what) {
  std::vector<std::string> out;
  if (!node) return out;
  auto arr = node.as_array();
  if (!arr) throw ConfigError(what + " must be an array of strings");
  for (const auto& v : *arr) {
    auto s = v.value<std::string>();
    if (!s) throw ConfigError(what + " must be an array of strings");
    out.push_back(*s);
  }
  return out;
}

std::optional<Timestamp> timestamp(View node) {
  if (!node) return std::nullopt;
  std::ostringstream ss;
  if (auto s = node.value<std::string>()) return parse_rfc3339(*s);
  if (auto dt = node.value<toml::date_time>())
    ss << *dt;
  else if (auto d = node.value<toml::date>())
    ss << *d;
  else
    throw ConfigError("expected a timestamp");
  return parse_rfc3339(ss.str());
}

double number(View node, double fallback, const std::string& what) {
  if (!node) return fallback;
  if (auto d = node.value<double>()) return *d;
  throw ConfigError(what + " must be a number");
}

ValueSpaceSpec space_spec(const toml::table& t, const std::string& origin) {
  View v{t};
  ValueSpaceSpec spec;
  spec.id = v["id"].value_or(std::string{});
  if (spec.id.empty()) throw ConfigError(origin + ": a space needs an id");
  auto where = origin + ": space '" + spec.id + "'";
  spec.kind = parse_space_kind(v["kind"].value_or(std::string{"word"}));
  if (auto m = v["min_cardinality"].value<std::int64_t>()) {
    if (*m < 1) throw ConfigError(where + ": min_cardinality must be positive");
    spec.min_cardinality = static_cast<std::uint64_t>(*m);
  }
  int sources = 0;
  if (v["values"]) {
    ++sources;
    spec.source = ListSource{strings(v["values"], where + " values")};
  }
  if (v["parts"]) {
    ++sources;
    PartsSource p;
    auto arr = v["parts"].as_array();
    if (!arr) throw ConfigError(where + ": parts must be an array of arrays");
    for (const auto& part : *arr) {
      auto inner = part.as_array();
      if (!inner) throw ConfigError(where + ": parts must be an array of arrays");
      std::vector<std::string> list;
      for (const auto& s : *inner) {
        auto str = s.value<std::string>();
        if (!str) throw ConfigError(where + ": parts must hold strings");
        list.push_back(*str);
      }
      p.parts.push_back(std::move(list));
    }
    p.separator = v["separator"].value_or(std::string{});
    spec.source = std::move(p);
  }
  if (v["pattern"]) {
    ++sources;
    spec.source = DigitPatternSource{v["pattern"].value_or(std::string{})};
  }
  if (v["range"]) {
    ++sources;
    auto arr = v["range"].as_array();
    if (!arr || arr->size() != 2 || !(*arr)[0].value<std::int64_t>() || !(*arr)[1].value<std::int64_t>())
      throw ConfigError(where + ": range must be [low, high]");
    spec.source = IntegerRangeSource{*(*arr)[0].value<std::int64_t>(), *(*arr)[1].value<std::int64_t>()};
  }
  if (v["dates"]) {
    ++sources;
    auto d = strings(v["dates"], where + " dates");
    if (d.size() != 2) throw ConfigError(where + ": dates must be [first, last]");
    spec.source = DateRangeSource{d[0], d[1]};
  }
  if (sources != 1) throw ConfigError(where + ": exactly one of values, parts, pattern, range, dates is required");
  return spec;
}

AgentLists agent_lists(const toml::table& t, const std::string& origin) {
  View v{t};
  AgentLists out;
  for (const auto& f : strings(v["search_families"], origin + " search_families")) out.search_families.insert(f);
  auto per_chatbot = [&](const char* key, std::map<std::string, std::set<std::string>>& dst) {
    if (!v[key]) return;
    auto tbl = v[key].as_table();
    if (!tbl) throw ConfigError(origin + ": " + key + " must be a table of chatbot = [families]");
    for (const auto& [k, node] : *tbl) {
      std::string chatbot(k.str());
      auto& set = dst[chatbot];
      for (const auto& f : strings(View{node}, origin + " " + key + "." + chatbot)) set.insert(f);
    }
  };
  per_chatbot("declared", out.declared);
  per_chatbot("publicly_known", out.publicly_known);
  return out;
}

}  // namespace canary::tomlu
