// Loopback backend: a deliberately small line-based HTTP/1.1 subset over
// 127.0.0.1 TCP. One thread per connection; plain requests are one-shot
// (connection: close), SSE responses keep the socket open and push frames as
// the SUT dispatches them. No chunked encoding, no TLS, no keep-alive.
#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <thread>

#include "agentsec/wire.hpp"

namespace agentsec::wire {

std::unique_ptr<Server> make_loopback_server(RouteTable routes);

namespace {

bool write_all(int fd, std::string_view bytes) {
  size_t sent = 0;
  while (sent < bytes.size()) {
    ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<size_t>(n);
  }
  return true;
}

// Buffered line/byte reader over a socket.
class SocketReader {
 public:
  explicit SocketReader(int fd) : fd_(fd) {}

  // Reads through the next '\n'; strips trailing "\r\n" / "\n". False on EOF.
  bool read_line(std::string& line) {
    line.clear();
    while (true) {
      size_t nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      if (!fill()) return false;
    }
  }

  bool read_exact(size_t n, std::string& out) {
    while (buffer_.size() < n) {
      if (!fill()) return false;
    }
    out = buffer_.substr(0, n);
    buffer_.erase(0, n);
    return true;
  }

  // Reads until EOF.
  std::string read_rest() {
    while (fill()) {
    }
    std::string out;
    out.swap(buffer_);
    return out;
  }

 private:
  bool fill() {
    char chunk[4096];
    ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n <= 0) return false;
    buffer_.append(chunk, static_cast<size_t>(n));
    return true;
  }

  int fd_;
  std::string buffer_;
};

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

bool parse_request_head(SocketReader& reader, Request& request, size_t& content_length) {
  std::string line;
  if (!reader.read_line(line)) return false;
  size_t sp1 = line.find(' ');
  size_t sp2 = line.rfind(' ');
  if (sp1 == std::string::npos || sp2 == sp1) return false;
  request.method = line.substr(0, sp1);
  std::string target = line.substr(sp1 + 1, sp2 - sp1 - 1);
  split_target(target, request.path, request.query);
  content_length = 0;
  while (reader.read_line(line)) {
    if (line.empty()) return true;
    size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    size_t value_start = colon + 1;
    while (value_start < line.size() && line[value_start] == ' ') ++value_start;
    std::string value = line.substr(value_start);
    std::string lk = lower(key);
    if (lk == "content-length") {
      content_length = static_cast<size_t>(std::strtoul(value.c_str(), nullptr, 10));
    } else if (lk == "host" || lk == "connection") {
      // transport plumbing; keep handler-visible headers identical to the
      // in-process backend
    } else {
      request.headers[key] = value;
    }
  }
  return false;
}

std::string serialize_response(const Response& response) {
  std::string out = "HTTP/1.1 " + std::to_string(response.status) + " " +
                    reason_phrase(response.status) + "\r\n";
  for (const auto& [k, v] : response.headers) out += k + ": " + v + "\r\n";
  out += "Content-Length: " + std::to_string(response.body.size()) + "\r\n";
  out += "Connection: close\r\n\r\n";
  out += response.body;
  return out;
}

class LoopbackServer : public Server {
 public:
  explicit LoopbackServer(RouteTable routes)
      : routes_(std::make_shared<const RouteTable>(std::move(routes))) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw BindFailure("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      ::close(listen_fd_);
      throw BindFailure("bind() failed on 127.0.0.1");
    }
    if (::listen(listen_fd_, 64) != 0) {
      ::close(listen_fd_);
      throw BindFailure("listen() failed");
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  ~LoopbackServer() override { stop(); }

  std::unique_ptr<Client> make_client() override;

  void stop() override {
    bool expected = false;
    if (!stopping_.compare_exchange_strong(expected, true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    {
      std::lock_guard<std::mutex> lock(conn_mu_);
      for (int fd : live_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& t : conn_threads_)
      if (t.joinable()) t.join();
  }

  std::uint16_t port() const override { return port_; }

 private:
  void accept_loop() {
    while (!stopping_.load()) {
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) break;
      std::lock_guard<std::mutex> lock(conn_mu_);
      if (stopping_.load()) {
        ::close(fd);
        break;
      }
      live_fds_.push_back(fd);
      conn_threads_.emplace_back([this, fd] { handle_connection(fd); });
    }
  }

  // Drops fd from the live set (so stop() cannot touch a recycled descriptor
  // number) and closes it.
  void finish_connection(int fd) {
    {
      std::lock_guard<std::mutex> lock(conn_mu_);
      std::erase(live_fds_, fd);
    }
    ::close(fd);
  }

  void handle_connection(int fd) {
    SocketReader reader(fd);
    Request request;
    size_t content_length = 0;
    if (!parse_request_head(reader, request, content_length)) {
      finish_connection(fd);
      return;
    }
    if (content_length > 0 && !reader.read_exact(content_length, request.body)) {
      finish_connection(fd);
      return;
    }

    HandlerResult result = dispatch(*routes_, request);
    if (auto* response = std::get_if<Response>(&result)) {
      write_all(fd, serialize_response(*response));
      finish_connection(fd);
      return;
    }

    // SSE upgrade: headers out, then hold the socket for dispatched frames.
    auto& accept = std::get<StreamAccept>(result);
    std::string head = "HTTP/1.1 200 OK\r\n";
    head += "Content-Type: text/event-stream\r\n";
    for (const auto& [k, v] : accept.headers) head += k + ": " + v + "\r\n";
    head += "Connection: close\r\n\r\n";
    if (!write_all(fd, head)) {
      finish_connection(fd);
      return;
    }

    auto handle = std::make_shared<StreamHandle>(next_stream_id());
    auto write_mu = std::make_shared<std::mutex>();
    handle->attach(
        [fd, write_mu](const SseEvent& e) {
          std::lock_guard<std::mutex> lock(*write_mu);
          return write_all(fd, encode_sse(e));
        },
        [fd] { ::shutdown(fd, SHUT_RDWR); });
    if (accept.on_open) accept.on_open(handle);

    // Watchdog: the client never speaks after the request, so a read return
    // means it hung up (or the server is stopping). Either way the stream is
    // done and the SUT-visible handle flips to closed.
    char sink[256];
    while (::recv(fd, sink, sizeof sink, 0) > 0) {
    }
    handle->close();
    finish_connection(fd);
  }

  static std::uint64_t next_stream_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
  }

  std::shared_ptr<const RouteTable> routes_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conn_mu_;
  std::vector<int> live_fds_;
  std::vector<std::thread> conn_threads_;
};

class LoopbackClient : public Client {
 public:
  explicit LoopbackClient(std::uint16_t port) : port_(port) {}

  Response request(const Request& request) override {
    int fd = connect_or_throw();
    std::string target = encode_target(request.path, request.query);
    std::string head = request.method + " " + target + " HTTP/1.1\r\n";
    head += "Host: 127.0.0.1\r\n";
    for (const auto& [k, v] : request.headers) head += k + ": " + v + "\r\n";
    head += "Content-Length: " + std::to_string(request.body.size()) + "\r\n";
    head += "Connection: close\r\n\r\n";
    write_all(fd, head);
    write_all(fd, request.body);

    SocketReader reader(fd);
    Response response;
    size_t content_length = 0;
    bool have_length = false;
    if (!read_response_head(reader, response, content_length, have_length)) {
      ::close(fd);
      throw std::runtime_error("malformed loopback response");
    }
    if (have_length) {
      reader.read_exact(content_length, response.body);
    } else {
      response.body = reader.read_rest();
    }
    ::close(fd);
    return response;
  }

  StreamResult open_stream(const std::string& target, const Headers& headers) override {
    int fd = connect_or_throw();
    std::string head = "GET " + target + " HTTP/1.1\r\n";
    head += "Host: 127.0.0.1\r\n";
    for (const auto& [k, v] : headers) head += k + ": " + v + "\r\n";
    head += "Accept: text/event-stream\r\n";
    head += "Connection: close\r\n\r\n";
    write_all(fd, head);

    auto reader = std::make_shared<SocketReader>(fd);
    Response response;
    size_t content_length = 0;
    bool have_length = false;
    if (!read_response_head(*reader, response, content_length, have_length)) {
      ::close(fd);
      throw std::runtime_error("malformed loopback response");
    }
    bool is_stream = false;
    auto ct = response.headers.find("Content-Type");
    if (response.status == 200 && ct != response.headers.end() &&
        ct->second.rfind("text/event-stream", 0) == 0)
      is_stream = true;
    if (!is_stream) {
      if (have_length) reader->read_exact(content_length, response.body);
      ::close(fd);
      return StreamResult{response.status, nullptr};
    }

    auto stream = std::make_shared<ClientStream>();
    stream->set_close_hook([fd] { ::shutdown(fd, SHUT_RDWR); });
    std::thread([stream, reader, fd] {
      SseDecoder decoder;
      std::string line;
      while (reader->read_line(line)) {
        decoder.feed(line);
        decoder.feed("\n");
        for (auto& e : decoder.take_events()) stream->push(e);
      }
      stream->mark_closed();
      ::close(fd);
    }).detach();
    return StreamResult{0, stream};
  }

 private:
  int connect_or_throw() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("client socket() failed");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port_);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      ::close(fd);
      throw std::runtime_error("connect() to loopback server failed");
    }
    return fd;
  }

  static bool read_response_head(SocketReader& reader, Response& response,
                                 size_t& content_length, bool& have_length) {
    std::string line;
    if (!reader.read_line(line)) return false;
    // "HTTP/1.1 200 OK"
    size_t sp = line.find(' ');
    if (sp == std::string::npos) return false;
    response.status = std::atoi(line.c_str() + sp + 1);
    content_length = 0;
    have_length = false;
    while (reader.read_line(line)) {
      if (line.empty()) return true;
      size_t colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = line.substr(0, colon);
      size_t value_start = colon + 1;
      while (value_start < line.size() && line[value_start] == ' ') ++value_start;
      std::string value = line.substr(value_start);
      if (lower(key) == "content-length") {
        content_length = static_cast<size_t>(std::strtoul(value.c_str(), nullptr, 10));
        have_length = true;
      } else if (lower(key) == "connection") {
        // ignore
      } else {
        response.headers[key] = value;
      }
    }
    return false;
  }

  std::uint16_t port_;
};

std::unique_ptr<Client> LoopbackServer::make_client() {
  return std::make_unique<LoopbackClient>(port_);
}

}  // namespace

std::unique_ptr<Server> make_loopback_server(RouteTable routes) {
  return std::make_unique<LoopbackServer>(std::move(routes));
}

}  // namespace agentsec::wire
