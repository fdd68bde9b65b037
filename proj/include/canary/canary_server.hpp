#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "canary/asn_database.hpp"
#include "canary/jsonl.hpp"
#include "canary/site_template.hpp"
#include "canary/token_store.hpp"
#include "canary/visit_log.hpp"

namespace canary {

struct HttpRequest {
  std::string host;
  std::string path;
  std::string source_ip;
  std::string user_agent;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "text/html; charset=utf-8";
};

struct ConditionTransition {
  Timestamp at{};
  std::string site_id;
  SiteCondition from = SiteCondition::Online;
  SiteCondition to = SiteCondition::Online;
};

struct ServerOptions {
  std::string ip_salt = "canary";
  bool interlink = true;
  std::string link_scheme = "https";
  /// Optional JSONL file receiving condition transitions.
  std::filesystem::path transition_log;
};

/// Request handling independent of any HTTP library: site lookup, condition
/// gating, fingerprinting, get-or-create, rendering and visit logging.
class CanaryServer {
 public:
  /// Registers every site with `store`; the spaces the sites bind must
  /// already be registered there. `misc` may be null.
  CanaryServer(std::vector<SiteTemplate> sites, std::shared_ptr<TokenStore> store,
               std::shared_ptr<AsnResolver> asn, std::shared_ptr<VisitSink> visits,
               std::shared_ptr<VisitSink> misc, ServerOptions options, Clock clock);

  HttpResponse handle_request(const HttpRequest& request);

  /// Returns false (and logs nothing) when the site already has `condition`.
  /// Throws NotFoundError for unknown sites.
  bool set_condition(const std::string& site_id, SiteCondition condition);
  SiteCondition condition(const std::string& site_id) const;
  std::vector<ConditionTransition> transitions() const;

  const SiteTemplate* site(const std::string& site_id) const;
  std::vector<std::string> site_ids() const;
  TokenStore& store() { return *store_; }

 private:
  struct Route {
    const SiteTemplate* site = nullptr;
    std::string path;
  };
  Route route(const HttpRequest& request) const;
  std::vector<std::string> peer_urls(const std::string& site_id) const;

  std::vector<SiteTemplate> sites_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_host_;
  std::shared_ptr<TokenStore> store_;
  std::shared_ptr<AsnResolver> asn_;
  std::shared_ptr<VisitSink> visits_;
  std::shared_ptr<VisitSink> misc_;
  ServerOptions options_;
  Clock clock_;
  std::unique_ptr<JsonlWriter> transition_writer_;

  mutable std::shared_mutex condition_mu_;
  std::unordered_map<std::string, SiteCondition> conditions_;
  std::vector<ConditionTransition> transitions_;
  std::unordered_map<std::string, std::vector<std::string>> peers_;
};

}  // namespace canary
