#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "canary/fingerprint.hpp"
#include "canary/site_template.hpp"
#include "canary/time.hpp"

namespace canary {

struct VisitRecord {
  Timestamp timestamp{};
  std::string site_id;  // empty in the misc log
  std::string host;
  std::string path;
  std::string source_ip_hash;
  std::string user_agent;
  std::uint32_t asn = 0;
  SiteCondition condition = SiteCondition::Online;
  int status = 0;
  bool assignment_created = false;

  ScraperFingerprint fingerprint() const { return {user_agent, asn}; }
  bool operator==(const VisitRecord&) const = default;
};

std::string visit_to_json(const VisitRecord& v);
VisitRecord visit_from_json(std::string_view line);

/// Salted SHA-256 of an address literal, lowercase hex.
std::string hash_source_ip(std::string_view salt, std::string_view ip);

/// Append target for visit records. append() stamps the record with the
/// sink's clock under its lock, so each shard's timestamps never decrease.
class VisitSink {
 public:
  explicit VisitSink(Clock clock) : clock_(std::move(clock)) {}
  virtual ~VisitSink() = default;

  Timestamp append(VisitRecord record);

 protected:
  virtual void write(const VisitRecord& record) = 0;

 private:
  std::mutex mu_;
  Clock clock_;
  Timestamp last_{};
};

class MemoryVisitSink : public VisitSink {
 public:
  using VisitSink::VisitSink;
  std::vector<VisitRecord> records() const;

 protected:
  void write(const VisitRecord& record) override {
    std::lock_guard lock(records_mu_);
    records_.push_back(record);
  }

 private:
  mutable std::mutex records_mu_;
  std::vector<VisitRecord> records_;
};

/// `<dir>/<prefix>-YYYY-MM-DD.jsonl`, one file per UTC day.
class JsonlVisitLog : public VisitSink {
 public:
  JsonlVisitLog(std::filesystem::path dir, std::string prefix, Clock clock);

 protected:
  void write(const VisitRecord& record) override;

 private:
  std::filesystem::path dir_;
  std::string prefix_;
  std::string day_;
  std::ofstream out_;
};

/// Reads a single JSONL file, or every *.jsonl under a directory in name
/// order (daily shards sort chronologically).
std::vector<VisitRecord> read_visit_log(const std::filesystem::path& path);

}  // namespace canary
