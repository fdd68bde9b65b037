#include "canary/canary_server.hpp"

#include <mutex>

#include "canary/error.hpp"
#include "canary/prompts.hpp"
#include "canary/text.hpp"
#include "json.hpp"

namespace canary {

CanaryServer::CanaryServer(std::vector<SiteTemplate> sites, std::shared_ptr<TokenStore> store,
                           std::shared_ptr<AsnResolver> asn, std::shared_ptr<VisitSink> visits,
                           std::shared_ptr<VisitSink> misc, ServerOptions options, Clock clock)
    : sites_(std::move(sites)),
      store_(std::move(store)),
      asn_(std::move(asn)),
      visits_(std::move(visits)),
      misc_(std::move(misc)),
      options_(std::move(options)),
      clock_(std::move(clock)) {
  if (!store_ || !asn_ || !visits_) throw ConfigError("server needs a token store, ASN resolver and visit sink");
  store_->add_global_reserved_text(prompt_boilerplate());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    const auto& s = sites_[i];
    if (!by_id_.emplace(s.site_id(), i).second) throw ConfigError("duplicate site id '" + s.site_id() + "'");
    for (const auto& h : s.profile().hosts)
      if (!by_host_.emplace(ascii_lower(h), i).second) throw ConfigError("host '" + h + "' bound to two sites");
    store_->register_site(s.site_id(), s.slot_spaces(), s.static_text());
    conditions_[s.site_id()] = SiteCondition::Online;
  }
  for (const auto& s : sites_) peers_[s.site_id()] = peer_urls(s.site_id());
  if (!options_.transition_log.empty()) transition_writer_ = std::make_unique<JsonlWriter>(options_.transition_log);
}

std::vector<std::string> CanaryServer::peer_urls(const std::string& site_id) const {
  std::vector<std::string> urls;
  for (const auto& s : sites_) {
    if (s.site_id() == site_id) continue;
    if (!s.profile().hosts.empty())
      urls.push_back(options_.link_scheme + "://" + s.profile().hosts.front() + "/");
    else
      urls.push_back("/" + s.site_id() + "/");
  }
  return urls;
}

CanaryServer::Route CanaryServer::route(const HttpRequest& request) const {
  auto host = ascii_lower(request.host);
  if (auto colon = host.rfind(':'); colon != std::string::npos && host.find(']') == std::string::npos &&
                                    host.find(':') == colon)
    host.resize(colon);
  else if (!host.empty() && host.front() == '[')
    host = host.substr(0, host.find(']') + 1);
  if (auto it = by_host_.find(host); it != by_host_.end()) return {&sites_[it->second], request.path};

  std::string_view p = request.path;
  if (p.empty() || p.front() != '/') return {};
  auto end = p.find_first_of("/?#", 1);
  auto id = std::string(p.substr(1, end == std::string_view::npos ? std::string_view::npos : end - 1));
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return {};
  std::string rest = end == std::string_view::npos ? "/" : std::string(p.substr(end));
  if (rest.front() != '/') rest.insert(0, "/");
  return {&sites_[it->second], rest};
}

HttpResponse CanaryServer::handle_request(const HttpRequest& request) {
  VisitRecord rec;
  rec.host = request.host;
  rec.path = request.path;
  rec.user_agent = request.user_agent;
  rec.source_ip_hash = hash_source_ip(options_.ip_salt, request.source_ip);

  auto r = route(request);
  if (!r.site) {
    rec.status = 404;
    try {
      rec.asn = resolve_asn(request.source_ip, *asn_->snapshot());
    } catch (const InputError&) {
      rec.status = 400;
    }
    if (misc_) misc_->append(rec);
    return {rec.status, {}, "text/plain"};
  }

  rec.site_id = r.site->site_id();
  rec.condition = condition(rec.site_id);
  HttpResponse resp;
  ScraperFingerprint fp;
  try {
    fp = fingerprint_of({request.source_ip, request.user_agent}, *asn_->snapshot());
  } catch (const InputError&) {
    rec.status = 400;
    visits_->append(rec);
    return {400, {}, "text/plain"};
  }
  rec.asn = fp.asn;

  auto robots_path = r.path.substr(0, r.path.find_first_of("?#"));
  if (rec.condition == SiteCondition::Offline) {
    resp = {404, {}, "text/plain"};
  } else if (robots_path == "/robots.txt") {
    if (auto body = robots_txt(rec.condition))
      resp = {200, *body, "text/plain; charset=utf-8"};
    else
      resp = {404, {}, "text/plain"};
  } else if (!r.site->resolve(r.path)) {
    resp = {404, {}, "text/plain"};
  } else {
    auto lookup = store_->get_or_create(rec.site_id, fp, clock_());
    rec.assignment_created = lookup.created;
    resp.body = r.site->render(lookup.assignment, r.path);
    if (options_.interlink) resp.body = inject_hidden_links(resp.body, peers_.at(rec.site_id));
  }
  rec.status = resp.status;
  visits_->append(rec);
  return resp;
}

bool CanaryServer::set_condition(const std::string& site_id, SiteCondition condition) {
  std::unique_lock lock(condition_mu_);
  auto it = conditions_.find(site_id);
  if (it == conditions_.end()) throw NotFoundError("unknown site '" + site_id + "'");
  if (it->second == condition) return false;
  ConditionTransition t{clock_(), site_id, it->second, condition};
  it->second = condition;
  transitions_.push_back(t);
  if (transition_writer_)
    transition_writer_->write(nlohmann::json{{"timestamp", to_rfc3339(t.at)},
                                             {"site_id", t.site_id},
                                             {"from", std::string(to_string(t.from))},
                                             {"to", std::string(to_string(t.to))}}
                                  .dump());
  return true;
}

SiteCondition CanaryServer::condition(const std::string& site_id) const {
  std::shared_lock lock(condition_mu_);
  auto it = conditions_.find(site_id);
  if (it == conditions_.end()) throw NotFoundError("unknown site '" + site_id + "'");
  return it->second;
}

std::vector<ConditionTransition> CanaryServer::transitions() const {
  std::shared_lock lock(condition_mu_);
  return transitions_;
}

const SiteTemplate* CanaryServer::site(const std::string& site_id) const {
  auto it = by_id_.find(site_id);
  return it == by_id_.end() ? nullptr : &sites_[it->second];
}

std::vector<std::string> CanaryServer::site_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : sites_) ids.push_back(s.site_id());
  return ids;
}

}  // namespace canary
