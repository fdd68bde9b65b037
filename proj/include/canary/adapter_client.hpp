#pragma once

#include <chrono>
#include <string>

#include "canary/chatbot_client.hpp"

namespace canary {

struct AdapterClientConfig {
  std::string chatbot_id;
  std::string host = "127.0.0.1";
  int port = 7077;
  std::chrono::seconds timeout{300};
};

/// Client for the browser adapter process: newline-delimited JSON over TCP,
/// one connection per chat session. Frames sent:
///   {"job_id","chatbot_id","prompt_text","session_hint"}
/// with session_hint "new_session" for the first query on a connection and
/// "continue_previous" afterwards. Replies:
///   {"job_id","status":"ok"|"failed","raw_text","error_detail"}
class AdapterClient : public ChatbotClient {
 public:
  explicit AdapterClient(AdapterClientConfig config);

  const std::string& chatbot_id() const override { return config_.chatbot_id; }
  Transport transport() const override { return Transport::BrowserAdapter; }
  /// Connects immediately; throws TransportError when the adapter is down.
  std::unique_ptr<ChatSession> open_session() override;

 private:
  AdapterClientConfig config_;
  std::string job_prefix_;
  std::atomic<std::uint64_t> jobs_{0};
};

}  // namespace canary
