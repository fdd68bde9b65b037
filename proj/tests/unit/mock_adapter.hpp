#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace testutil {

// One-connection-at-a-time line server; `reply` maps each request frame to a
// reply line (empty string closes the connection).
class MockAdapter {
 public:
  explicit MockAdapter(std::function<std::string(const nlohmann::json&)> reply) : reply_(std::move(reply)) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) throw std::runtime_error("bind failed");
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    ::listen(fd_, 4);
    thread_ = std::thread([this] { serve(); });
  }
  ~MockAdapter() {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    thread_.join();
  }
  int port() const { return port_; }
  std::vector<nlohmann::json> frames() const {
    std::lock_guard lock(mu_);
    return frames_;
  }

 private:
  void serve() {
    for (;;) {
      int c = ::accept(fd_, nullptr, nullptr);
      if (c < 0) return;
      std::string buf;
      char chunk[4096];
      bool open = true;
      while (open) {
        auto n = ::recv(c, chunk, sizeof chunk, 0);
        if (n <= 0) break;
        buf.append(chunk, static_cast<std::size_t>(n));
        for (auto nl = buf.find('\n'); nl != std::string::npos; nl = buf.find('\n')) {
          auto frame = nlohmann::json::parse(buf.substr(0, nl));
          buf.erase(0, nl + 1);
          {
            std::lock_guard lock(mu_);
            frames_.push_back(frame);
          }
          auto out = reply_(frame);
          if (out.empty()) {
            open = false;
            break;
          }
          out += "\n";
          ::send(c, out.data(), out.size(), MSG_NOSIGNAL);
        }
      }
      ::close(c);
    }
  }

  std::function<std::string(const nlohmann::json&)> reply_;
  mutable std::mutex mu_;
  std::vector<nlohmann::json> frames_;
  int fd_ = -1;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace testutil
