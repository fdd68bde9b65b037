#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "canary/inference.hpp"
#include "canary/time.hpp"
#include "canary/value_space.hpp"

namespace canary::tomlu {

using View = toml::node_view<const toml::node>;

/// Parse errors become ConfigError with the line number.
toml::table parse(std::string_view text, const std::string& origin);
std::string read_text(const std::filesystem::path& path);

std::vector<std::string> strings(View node, const std::string& what);
std::optional<Timestamp> timestamp(View node);
double number(View node, double fallback, const std::string& what);

/// `[[spaces]]` entry: id, kind and exactly one of values, parts (+separator),
/// pattern, range = [low, high] or dates = [first, last].
ValueSpaceSpec space_spec(const toml::table& t, const std::string& origin);

/// search_families, declared.<chatbot>, publicly_known.<chatbot>.
AgentLists agent_lists(const toml::table& t, const std::string& origin);

}  // namespace canary::tomlu
