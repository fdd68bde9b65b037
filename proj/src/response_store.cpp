#include "canary/response_store.hpp"

#include <set>

#include "canary/error.hpp"
#include "json.hpp"

namespace canary {

using nlohmann::json;

std::string_view to_string(Transport t) {
  switch (t) {
    case Transport::Api: return "api";
    case Transport::BrowserAdapter: return "browser-adapter";
    case Transport::Manual: return "manual";
    case Transport::Simulated: return "simulated";
  }
  return "api";
}

Transport parse_transport(std::string_view text) {
  if (text == "api") return Transport::Api;
  if (text == "browser-adapter") return Transport::BrowserAdapter;
  if (text == "manual") return Transport::Manual;
  if (text == "simulated") return Transport::Simulated;
  throw InputError("unknown transport '" + std::string(text) + "'");
}

std::string response_to_json(const ResponseRecord& r) {
  json j{{"chatbot_id", r.chatbot_id},
         {"site_id", r.site_id},
         {"interaction_id", r.interaction_id},
         {"query_index", r.query_index},
         {"condition", std::string(to_string(r.condition))},
         {"round_label", r.round_label},
         {"raw_text", r.raw_text},
         {"timestamp", to_rfc3339(r.timestamp)},
         {"transport", std::string(to_string(r.transport))}};
  if (r.failed) {
    j["failed"] = true;
    j["error_detail"] = r.error_detail;
  }
  return j.dump();
}

ResponseRecord response_from_json(std::string_view line) {
  auto j = json::parse(line);
  ResponseRecord r;
  r.chatbot_id = j.at("chatbot_id").get<std::string>();
  r.site_id = j.at("site_id").get<std::string>();
  r.interaction_id = j.at("interaction_id").get<std::string>();
  r.query_index = j.at("query_index").get<int>();
  if (r.query_index != 1 && r.query_index != 2) throw InputError("query_index must be 1 or 2");
  r.condition = parse_site_condition(j.at("condition").get<std::string>());
  r.round_label = j.at("round_label").get<std::string>();
  r.raw_text = j.at("raw_text").get<std::string>();
  r.timestamp = parse_rfc3339(j.at("timestamp").get<std::string>());
  r.transport = parse_transport(j.at("transport").get<std::string>());
  r.failed = j.value("failed", false);
  r.error_detail = j.value("error_detail", "");
  return r;
}

ResponseStore::ResponseStore(const std::filesystem::path& file) : path_(file), writer_(file) {}

void ResponseStore::append(const ResponseRecord& r) { writer_.write(response_to_json(r)); }

std::vector<ResponseRecord> read_responses(const std::filesystem::path& path) {
  std::vector<ResponseRecord> out;
  for (const auto& file : jsonl_files(path))
    for_each_jsonl_line(file, [&](std::string_view line, std::size_t n) {
      try {
        out.push_back(response_from_json(line));
      } catch (const std::exception& e) {
        throw DataIntegrityError(file.string() + ":" + std::to_string(n) + ": " + e.what());
      }
    });
  validate_responses(out);
  return out;
}

void validate_responses(const std::vector<ResponseRecord>& records) {
  std::set<std::string> primaries;
  for (const auto& r : records)
    if (r.query_index == 1) primaries.insert(r.interaction_id);
  for (const auto& r : records)
    if (r.query_index == 2 && !primaries.contains(r.interaction_id))
      throw DataIntegrityError("follow-up for interaction '" + r.interaction_id + "' has no primary record");
}

}  // namespace canary
