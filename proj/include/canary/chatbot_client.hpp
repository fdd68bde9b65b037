#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "canary/response_store.hpp"

namespace canary {

/// One chat conversation. Queries sent through the same session share
/// context on the provider side.
class ChatSession {
 public:
  virtual ~ChatSession() = default;
  /// Returns the reply text; throws TransportError on failure.
  virtual std::string send(const std::string& prompt) = 0;
};

class ChatbotClient {
 public:
  virtual ~ChatbotClient() = default;
  virtual const std::string& chatbot_id() const = 0;
  virtual Transport transport() const = 0;
  virtual std::unique_ptr<ChatSession> open_session() = 0;
};

/// "<prefix>-000001", "<prefix>-000002", ... Thread-safe.
class InteractionIdGenerator {
 public:
  explicit InteractionIdGenerator(std::string prefix) : prefix_(std::move(prefix)) {}
  std::string next();

 private:
  std::string prefix_;
  std::atomic<std::uint64_t> counter_{0};
};

/// Prefix for live campaigns: UTC time plus random bits, so ids from
/// separate invocations never collide.
std::string fresh_interaction_prefix();

struct TranscriptTurn {
  int index = 0;
  std::string query;
  std::string response;
};

/// Operator-pasted transcript. Sections start with header lines
/// "Query 1:", "Response 1:", "Query 2:", "Response 2:" (case-insensitive;
/// text may follow the colon on the same line). Throws InputError when no
/// "Response 1:" section exists or a section repeats.
std::vector<TranscriptTurn> parse_transcript(std::string_view text);

}  // namespace canary
