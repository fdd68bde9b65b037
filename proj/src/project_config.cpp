#include "canary/project_config.hpp"

#include <set>

#include "canary/builtin_spaces.hpp"
#include "canary/campaign.hpp"
#include "canary/error.hpp"
#include "toml_support.hpp"

namespace canary {

namespace {

std::chrono::seconds seconds_of(tomlu::View node, std::chrono::seconds fallback) {
  if (!node) return fallback;
  if (auto s = node.value<std::string>()) return std::chrono::duration_cast<std::chrono::seconds>(parse_duration(*s));
  if (auto n = node.value<std::int64_t>()) return std::chrono::seconds(*n);
  throw ConfigError("timeout must be a duration string or a number of seconds");
}

}  // namespace

ProjectConfig parse_project_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                                   const std::string& origin) {
  auto tbl = tomlu::parse(toml_text, origin);
  tomlu::View root{tbl};
  ProjectConfig c;
  auto path = [&](tomlu::View node, std::filesystem::path& dst) {
    if (auto s = node.value<std::string>()) dst = *s;
    if (!dst.empty() && dst.is_relative()) dst = base_dir / dst;
  };
  auto paths = root["paths"];
  path(paths["templates"], c.templates_dir);
  path(paths["store"], c.store_dir);
  path(paths["visits"], c.visits_dir);
  path(paths["misc"], c.misc_dir);
  path(paths["responses"], c.responses_path);
  path(paths["transitions"], c.transitions_path);
  path(paths["asn_db"], c.asn_db);
  path(paths["plan"], c.plan_path);

  auto server = root["server"];
  c.listen = server["listen"].value_or(c.listen);
  c.ip_salt = server["ip_salt"].value_or(c.ip_salt);
  c.interlink = server["interlink"].value_or(c.interlink);

  auto tokens = root["tokens"];
  c.tokens.secret_key = tokens["secret"].value_or(c.tokens.secret_key);
  if (c.tokens.secret_key.empty()) throw ConfigError(origin + ": tokens.secret must not be empty");
  if (auto scope = tokens["exclusion_scope"].value<std::string>()) c.tokens.scope = parse_exclusion_scope(*scope);

  if (auto spaces = root["spaces"].as_array())
    for (const auto& n : *spaces) {
      auto t = n.as_table();
      if (!t) throw ConfigError(origin + ": [[spaces]] entries must be tables");
      c.spaces.push_back(tomlu::space_spec(*t, origin));
    }

  auto inf = root["inference"];
  auto threshold = [&](const char* key, std::uint64_t fallback) -> std::uint64_t {
    if (!inf[key]) return fallback;
    auto v = inf[key].value<std::int64_t>();
    if (!v) throw ConfigError(origin + ": inference." + key + " must be an integer");
    if (*v < 1) throw ConfigError(origin + ": inference." + key + " must be at least 1");
    return static_cast<std::uint64_t>(*v);
  };
  c.inference.t = threshold("t", c.inference.t);
  c.inference.w = threshold("w", c.inference.w);
  if (auto v = inf["variant"].value<std::string>()) c.inference.variant = parse_match_variant(*v);

  c.campaign_start = tomlu::timestamp(root["campaign"]["start"]);
  if (auto d = root["campaign"]["politeness_delay"].value<std::string>()) c.politeness_delay = parse_duration(*d);

  std::set<std::string> ids;
  if (auto arr = root["chatbots"].as_array())
    for (const auto& n : *arr) {
      auto t = n.as_table();
      if (!t) throw ConfigError(origin + ": [[chatbots]] entries must be tables");
      tomlu::View v{*t};
      ChatbotConfig b;
      b.id = v["id"].value_or(std::string{});
      if (b.id.empty()) throw ConfigError(origin + ": a chatbot needs an id");
      if (!ids.insert(b.id).second) throw ConfigError(origin + ": chatbot '" + b.id + "' declared twice");
      b.transport = parse_transport(v["transport"].value_or(std::string{"api"}));
      if (b.transport == Transport::Api) {
        b.api.chatbot_id = b.id;
        b.api.endpoint = v["endpoint"].value_or(std::string{});
        b.api.model = v["model"].value_or(std::string{});
        b.api.web_search = v["web_search"].value_or(true);
        b.api.auth_env = v["auth_env"].value_or(std::string{});
        b.api.timeout = seconds_of(v["timeout"], b.api.timeout);
        if (b.api.endpoint.empty()) throw ConfigError(origin + ": chatbot '" + b.id + "' needs an endpoint");
      } else if (b.transport == Transport::BrowserAdapter) {
        b.adapter.chatbot_id = b.id;
        b.adapter.host = v["host"].value_or(b.adapter.host);
        auto port = v["port"].value_or(std::int64_t{b.adapter.port});
        if (port < 1 || port > 65535) throw ConfigError(origin + ": chatbot '" + b.id + "' port out of range");
        b.adapter.port = static_cast<int>(port);
        b.adapter.timeout = seconds_of(v["timeout"], b.adapter.timeout);
      } else if (b.transport == Transport::Simulated) {
        throw ConfigError(origin + ": chatbot '" + b.id + "': simulated chatbots belong in scenario files");
      }
      c.chatbots.push_back(std::move(b));
    }

  if (auto agents = root["agents"].as_table()) c.agents = tomlu::agent_lists(*agents, origin);
  return c;
}

ProjectConfig load_project_config(const std::filesystem::path& path) {
  return parse_project_config(tomlu::read_text(path), path.parent_path(), path.string());
}

std::vector<ValueSpace> config_spaces(const ProjectConfig& config) {
  std::vector<ValueSpace> out;
  std::set<std::string> ids;
  for (const auto& spec : builtin_space_specs()) {
    ids.insert(spec.id);
    out.push_back(build_value_space(spec));
  }
  for (const auto& spec : config.spaces) {
    if (!ids.insert(spec.id).second) throw ConfigError("space '" + spec.id + "' is defined twice");
    out.push_back(build_value_space(spec));
  }
  return out;
}

std::unique_ptr<ChatbotClient> make_chatbot_client(const ChatbotConfig& c) {
  switch (c.transport) {
    case Transport::Api:
      return std::make_unique<ApiClient>(c.api);
    case Transport::BrowserAdapter:
      return std::make_unique<AdapterClient>(c.adapter);
    default:
      throw ConfigError("chatbot '" + c.id + "' has no automated transport (use probe import)");
  }
}

}  // namespace canary
