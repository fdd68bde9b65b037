#include "canary/http_frontend.hpp"

#include <httplib.h>

#include "canary/error.hpp"
#include "json.hpp"

namespace canary {

namespace {

bool is_loopback(const std::string& addr) {
  return addr == "127.0.0.1" || addr == "::1" || addr.rfind("127.", 0) == 0 || addr == "::ffff:127.0.0.1";
}

}  // namespace

struct HttpFrontend::Impl {
  Impl(CanaryServer& s, StatsProvider p) : server(s), stats(std::move(p)) {}
  CanaryServer& server;
  StatsProvider stats;
  httplib::Server http;
};

HttpFrontend::HttpFrontend(CanaryServer& server, StatsProvider stats)
    : impl_(std::make_unique<Impl>(server, std::move(stats))) {
  auto& http = impl_->http;
  Impl* self = impl_.get();

  http.Post("/admin/condition", [self](const httplib::Request& req, httplib::Response& res) {
    if (!is_loopback(req.remote_addr)) {
      res.status = 403;
      return;
    }
    try {
      auto j = nlohmann::json::parse(req.body);
      auto site = j.at("site_id").get<std::string>();
      auto cond = parse_site_condition(j.at("condition").get<std::string>());
      bool changed = self->server.set_condition(site, cond);
      res.set_content(nlohmann::json{{"site_id", site}, {"condition", std::string(to_string(cond))}, {"changed", changed}}
                          .dump(),
                      "application/json");
    } catch (const NotFoundError& e) {
      res.status = 404;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });

  http.Get("/admin/stats", [self](const httplib::Request& req, httplib::Response& res) {
    if (!is_loopback(req.remote_addr)) {
      res.status = 403;
      return;
    }
    res.set_content(self->stats ? self->stats() : "{}", "application/json");
  });

  auto serve = [self](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r{req.get_header_value("Host"), req.target.empty() ? req.path : req.target, req.remote_addr,
                  req.get_header_value("User-Agent")};
    try {
      auto out = self->server.handle_request(r);
      res.status = out.status;
      if (!out.body.empty() || out.status == 200) res.set_content(out.body, out.content_type);
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(e.what(), "text/plain");
    }
  };
  http.Get(".*", serve);
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpFrontend::listen_after_bind() { impl_->http.listen_after_bind(); }

void HttpFrontend::stop() {
  if (impl_) impl_->http.stop();
}

std::pair<std::string, int> parse_listen_address(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos) throw ConfigError("listen address '" + std::string(text) + "' lacks a port");
  std::string host(text.substr(0, colon));
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  if (host.empty()) host = "0.0.0.0";
  int port = -1;
  try {
    port = std::stoi(std::string(text.substr(colon + 1)));
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) throw ConfigError("bad port in listen address '" + std::string(text) + "'");
  return {host, port};
}

}  // namespace canary
