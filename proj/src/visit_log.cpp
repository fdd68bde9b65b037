#include "canary/visit_log.hpp"

#include <algorithm>

#include <openssl/evp.h>

#include "canary/error.hpp"
#include "canary/jsonl.hpp"
#include "canary/text.hpp"
#include "json.hpp"

namespace canary {

using nlohmann::json;

std::string visit_to_json(const VisitRecord& v) {
  json j{{"timestamp", to_rfc3339(v.timestamp)},
         {"site_id", v.site_id},
         {"host", v.host},
         {"path", v.path},
         {"source_ip_hash", v.source_ip_hash},
         {"user_agent", v.user_agent},
         {"asn", v.asn},
         {"condition", std::string(to_string(v.condition))},
         {"status", v.status},
         {"assignment_created", v.assignment_created}};
  return j.dump();
}

VisitRecord visit_from_json(std::string_view line) {
  auto j = json::parse(line);
  VisitRecord v;
  v.timestamp = parse_rfc3339(j.at("timestamp").get<std::string>());
  v.site_id = j.at("site_id").get<std::string>();
  v.host = j.value("host", "");
  v.path = j.at("path").get<std::string>();
  v.source_ip_hash = j.value("source_ip_hash", "");
  v.user_agent = j.at("user_agent").get<std::string>();
  v.asn = j.at("asn").get<std::uint32_t>();
  v.condition = parse_site_condition(j.at("condition").get<std::string>());
  v.status = j.at("status").get<int>();
  v.assignment_created = j.value("assignment_created", false);
  return v;
}

std::string hash_source_ip(std::string_view salt, std::string_view ip) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error("EVP_MD_CTX_new failed");
  bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
            EVP_DigestUpdate(ctx, salt.data(), salt.size()) == 1 &&
            EVP_DigestUpdate(ctx, ip.data(), ip.size()) == 1 && EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-256 digest failed");
  return hex_lower(digest, len);
}

Timestamp VisitSink::append(VisitRecord record) {
  std::lock_guard lock(mu_);
  record.timestamp = std::max(clock_(), last_);
  last_ = record.timestamp;
  write(record);
  return record.timestamp;
}

std::vector<VisitRecord> MemoryVisitSink::records() const {
  std::lock_guard lock(records_mu_);
  return records_;
}

JsonlVisitLog::JsonlVisitLog(std::filesystem::path dir, std::string prefix, Clock clock)
    : VisitSink(std::move(clock)), dir_(std::move(dir)), prefix_(std::move(prefix)) {
  std::filesystem::create_directories(dir_);
}

void JsonlVisitLog::write(const VisitRecord& record) {
  auto day = utc_date(record.timestamp);
  if (day != day_ || !out_.is_open()) {
    out_.close();
    auto path = dir_ / (prefix_ + "-" + day + ".jsonl");
    out_.open(path, std::ios::app | std::ios::binary);
    if (!out_) throw Error("cannot open visit log " + path.string());
    day_ = day;
  }
  out_ << visit_to_json(record) << '\n';
  out_.flush();
}

std::vector<VisitRecord> read_visit_log(const std::filesystem::path& path) {
  std::vector<VisitRecord> out;
  for (const auto& file : jsonl_files(path))
    for_each_jsonl_line(file, [&](std::string_view line, std::size_t line_no) {
      try {
        out.push_back(visit_from_json(line));
      } catch (const std::exception& e) {
        throw DataIntegrityError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    });
  return out;
}

}  // namespace canary
