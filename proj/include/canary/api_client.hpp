#pragma once

#include <chrono>
#include <string>

#include "canary/chatbot_client.hpp"

namespace canary {

struct ApiClientConfig {
  std::string chatbot_id;
  std::string endpoint;  // e.g. "https://api.example.com/v1/chat/completions"
  std::string model;
  bool web_search = true;
  std::string auth_env;  // environment variable holding the bearer token
  std::chrono::seconds timeout{120};
};

/// OpenAI-compatible chat-completions client. A session keeps the message
/// history and resends it with each query, so the follow-up sees the
/// primary exchange.
class ApiClient : public ChatbotClient {
 public:
  explicit ApiClient(ApiClientConfig config);

  const std::string& chatbot_id() const override { return config_.chatbot_id; }
  Transport transport() const override { return Transport::Api; }
  std::unique_ptr<ChatSession> open_session() override;

  const ApiClientConfig& config() const { return config_; }

 private:
  ApiClientConfig config_;
};

/// Request body for one turn; exposed for tests.
std::string chat_completion_request(const ApiClientConfig& config,
                                    const std::vector<std::pair<std::string, std::string>>& messages);
/// Reply text from a chat-completions response body. Throws TransportError
/// when the body has no choices[0].message.content.
std::string chat_completion_text(std::string_view body);

}  // namespace canary
