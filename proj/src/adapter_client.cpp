#include "canary/adapter_client.hpp"

#include <cerrno>
#include <cstring>

#include <netdb.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include "canary/error.hpp"
#include "json.hpp"

namespace canary {

using nlohmann::json;

namespace {

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

int connect_tcp(const std::string& host, int port, std::chrono::seconds timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  auto port_str = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res); rc != 0)
    throw TransportError("adapter address " + host + ": " + gai_strerror(rc));
  int fd = -1;
  std::string last_error = "no addresses";
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_error = std::strerror(errno);
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw TransportError("cannot reach adapter at " + host + ":" + port_str + ": " + last_error);
  timeval tv{static_cast<time_t>(timeout.count()), 0};
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
  return fd;
}

class AdapterSession : public ChatSession {
 public:
  AdapterSession(const AdapterClientConfig& config, const std::string& job_prefix, std::atomic<std::uint64_t>& jobs)
      : config_(config),
        job_prefix_(job_prefix),
        jobs_(jobs),
        sock_(connect_tcp(config.host, config.port, config.timeout)) {}

  std::string send(const std::string& prompt) override {
    auto job_id = job_prefix_ + "-" + std::to_string(jobs_.fetch_add(1) + 1);
    json frame{{"job_id", job_id},
               {"chatbot_id", config_.chatbot_id},
               {"prompt_text", prompt},
               {"session_hint", started_ ? "continue_previous" : "new_session"}};
    write_line(frame.dump());
    started_ = true;
    json reply;
    try {
      reply = json::parse(read_line());
    } catch (const json::exception& e) {
      throw TransportError(std::string("malformed adapter reply: ") + e.what());
    }
    auto status = reply.value("status", "");
    auto got_id = reply.contains("job_id") && reply["job_id"].is_string() ? reply["job_id"].get<std::string>() : "";
    if (got_id != job_id)
      throw TransportError("adapter replied for job '" + got_id + "' while '" + job_id + "' was pending" +
                           (reply.contains("error_detail") ? ": " + reply.value("error_detail", "") : ""));
    if (status != "ok") throw TransportError("adapter job failed: " + reply.value("error_detail", status));
    auto text = reply.value("raw_text", "");
    if (text.empty()) throw TransportError("adapter reported ok with empty raw_text");
    return text;
  }

 private:
  void write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      auto n = ::send(sock_.fd(), data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n <= 0) throw TransportError(std::string("adapter write failed: ") + std::strerror(errno));
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        auto line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      auto n = ::recv(sock_.fd(), chunk, sizeof chunk, 0);
      if (n == 0) throw TransportError("adapter closed the connection");
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(errno == EAGAIN || errno == EWOULDBLOCK ? "adapter reply timed out"
                                                                     : std::string("adapter read failed: ") +
                                                                           std::strerror(errno));
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  const AdapterClientConfig& config_;
  const std::string& job_prefix_;
  std::atomic<std::uint64_t>& jobs_;
  Socket sock_;
  std::string buffer_;
  bool started_ = false;
};

}  // namespace

AdapterClient::AdapterClient(AdapterClientConfig config) : config_(std::move(config)) {
  if (config_.chatbot_id.empty()) throw ConfigError("adapter client needs a chatbot id");
  job_prefix_ = config_.chatbot_id + "-" + fresh_interaction_prefix();
}

std::unique_ptr<ChatSession> AdapterClient::open_session() {
  return std::make_unique<AdapterSession>(config_, job_prefix_, jobs_);
}

}  // namespace canary
