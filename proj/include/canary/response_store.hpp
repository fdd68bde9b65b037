#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "canary/jsonl.hpp"
#include "canary/site_template.hpp"
#include "canary/time.hpp"

namespace canary {

enum class Transport { Api, BrowserAdapter, Manual, Simulated };

std::string_view to_string(Transport t);
Transport parse_transport(std::string_view text);

struct ResponseRecord {
  std::string chatbot_id;
  std::string site_id;
  std::string interaction_id;
  int query_index = 1;  // 1 = primary, 2 = follow-up
  SiteCondition condition = SiteCondition::Online;
  std::string round_label;
  std::string raw_text;
  Timestamp timestamp{};
  Transport transport = Transport::Api;
  bool failed = false;
  std::string error_detail;

  bool operator==(const ResponseRecord&) const = default;
};

std::string response_to_json(const ResponseRecord& r);
ResponseRecord response_from_json(std::string_view line);

/// Append-only JSON Lines response log, safe for concurrent writers.
class ResponseStore {
 public:
  explicit ResponseStore(const std::filesystem::path& file);
  void append(const ResponseRecord& r);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  JsonlWriter writer_;
};

/// Reads a file or a directory of *.jsonl files. Throws DataIntegrityError
/// on malformed lines or a follow-up without its primary.
std::vector<ResponseRecord> read_responses(const std::filesystem::path& path);

/// Checks the query_index invariant over a record set.
void validate_responses(const std::vector<ResponseRecord>& records);

}  // namespace canary
