#pragma once

#include <functional>
#include <memory>
#include <string>

#include "canary/canary_server.hpp"

namespace canary {

/// Binds a CanaryServer to a listening socket. Admin endpoints answer only
/// loopback peers:
///   POST /admin/condition   {"site_id": "...", "condition": "offline"}
///   GET  /admin/stats       site_stats JSON
class HttpFrontend {
 public:
  using StatsProvider = std::function<std::string()>;

  HttpFrontend(CanaryServer& server, StatsProvider stats);
  ~HttpFrontend();

  /// Binds and returns the port (useful with port 0). Throws on failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "127.0.0.1:8080", "[::1]:8080", ":8080" (all interfaces).
std::pair<std::string, int> parse_listen_address(std::string_view text);

}  // namespace canary
