#include "canary/api_client.hpp"

#include <cstdlib>

#include <httplib.h>

#include "canary/error.hpp"
#include "json.hpp"

namespace canary {

using nlohmann::json;

std::string chat_completion_request(const ApiClientConfig& config,
                                    const std::vector<std::pair<std::string, std::string>>& messages) {
  json msgs = json::array();
  for (const auto& [role, content] : messages) msgs.push_back({{"role", role}, {"content", content}});
  json body{{"model", config.model}, {"messages", std::move(msgs)}};
  if (config.web_search) body["web_search_options"] = json::object();
  return body.dump();
}

std::string chat_completion_text(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw TransportError(std::string("unparseable chat completion: ") + e.what());
  }
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    // Some providers return content parts.
    std::string out;
    for (const auto& part : content)
      if (part.contains("text")) out += part.at("text").get<std::string>();
    return out;
  } catch (const json::exception&) {
    throw TransportError("chat completion has no choices[0].message.content");
  }
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme");
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

class ApiSession : public ChatSession {
 public:
  explicit ApiSession(const ApiClientConfig& config) : config_(config) {}

  std::string send(const std::string& prompt) override {
    auto ep = split_url(config_.endpoint);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(std::chrono::seconds(30));
    httplib::Headers headers;
    if (!config_.auth_env.empty()) {
      const char* token = std::getenv(config_.auth_env.c_str());
      if (!token || !*token) throw TransportError("environment variable " + config_.auth_env + " is not set");
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    auto history = messages_;
    history.emplace_back("user", prompt);
    auto res = client.Post(ep.path, headers, chat_completion_request(config_, history), "application/json");
    if (!res) throw TransportError(config_.chatbot_id + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw TransportError(config_.chatbot_id + ": HTTP " + std::to_string(res->status) + " " +
                           res->body.substr(0, 200));
    auto text = chat_completion_text(res->body);
    messages_ = std::move(history);
    messages_.emplace_back("assistant", text);
    return text;
  }

 private:
  const ApiClientConfig& config_;
  std::vector<std::pair<std::string, std::string>> messages_;
};

}  // namespace

ApiClient::ApiClient(ApiClientConfig config) : config_(std::move(config)) {
  if (config_.chatbot_id.empty()) throw ConfigError("API client needs a chatbot id");
  split_url(config_.endpoint);
}

std::unique_ptr<ChatSession> ApiClient::open_session() { return std::make_unique<ApiSession>(config_); }

}  // namespace canary
