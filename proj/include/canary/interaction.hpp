#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>

#include "canary/chatbot_client.hpp"
#include "canary/prompts.hpp"
#include "canary/response_store.hpp"

namespace canary {

struct InteractionResult {
  ResponseRecord primary;
  std::optional<ResponseRecord> followup;  // absent when the primary failed
  bool failed = false;
};

/// Sends the primary then the follow-up prompt through one fresh session.
/// A transport failure marks the failing record (failed, error_detail) and
/// stops; records produced so far are appended to `store` when given.
InteractionResult run_interaction(ChatbotClient& client, const SiteTemplate& site, const std::string& round_label,
                                  SiteCondition condition, const std::string& interaction_id, ResponseStore* store,
                                  const Clock& clock);

/// Serializes interactions per chatbot and spaces them by a politeness
/// delay; distinct chatbots proceed concurrently.
class Dispatcher {
 public:
  using Sleeper = std::function<void(Duration)>;

  explicit Dispatcher(Duration delay = std::chrono::seconds(5), Clock clock = system_clock(), Sleeper sleeper = {});

  InteractionResult run(ChatbotClient& client, const SiteTemplate& site, const std::string& round_label,
                        SiteCondition condition, InteractionIdGenerator& ids, ResponseStore* store);

 private:
  struct Lane {
    std::mutex mu;
    std::optional<Timestamp> last_finished;
  };
  Lane& lane(const std::string& chatbot_id);

  Duration delay_;
  Clock clock_;
  Sleeper sleeper_;
  std::mutex lanes_mu_;
  std::map<std::string, std::unique_ptr<Lane>> lanes_;
};

}  // namespace canary
