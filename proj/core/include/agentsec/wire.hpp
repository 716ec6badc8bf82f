// Message transport with two interchangeable backends:
//
//   * in-process  — handlers invoked directly on the caller thread; fully
//                   deterministic, the default for experiments and CI;
//   * loopback    — a real line-based HTTP/1.1 subset over 127.0.0.1 TCP,
//                   thread-per-connection, SSE responses held open.
//
// Route handlers, SUT logic and attack scripts are written once against the
// Client/Server interfaces and behave identically under either backend.
#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "agentsec/sse.hpp"

namespace agentsec::wire {

using Headers = std::map<std::string, std::string>;

// Generic sanitized error body shared by 400-class and 500-class failures.
inline constexpr char kGenericErrorBody[] = "Bad Request";

// The lab's closed status vocabulary.
bool valid_status(int status);
std::string reason_phrase(int status);

struct Request {
  std::string method;
  std::string path;  // no query string
  std::map<std::string, std::string> query;
  Headers headers;
  std::string body;
  // Filled by the router from {param} pattern segments.
  std::map<std::string, std::string> path_params;
};

struct Response {
  int status = 200;
  Headers headers;
  std::string body;
};

Response make_response(int status, std::string body, Headers headers = {});

// ---------------------------------------------------------------------------
// Server-side stream endpoint. Handlers that accept an SSE request receive a
// StreamHandle through StreamAccept::on_open; the SUT keeps it to dispatch
// events and tags it with its session affiliation. Closed handles silently
// drop sends.
class StreamHandle {
 public:
  explicit StreamHandle(std::uint64_t id) : id_(id) {}

  std::uint64_t id() const { return id_; }

  bool send(const SseEvent& event);
  void close();
  bool open() const;

  void set_session(const std::string& session_id);
  std::string session() const;

  // Backend wiring; not for SUT use.
  void attach(std::function<bool(const SseEvent&)> sink, std::function<void()> on_close);

 private:
  const std::uint64_t id_;
  mutable std::mutex mu_;
  bool open_ = true;
  std::string session_;
  std::function<bool(const SseEvent&)> sink_;
  std::function<void()> on_close_;
};

using StreamHandlePtr = std::shared_ptr<StreamHandle>;

// Returned by a handler to upgrade the request to an event stream.
struct StreamAccept {
  Headers headers;
  std::function<void(StreamHandlePtr)> on_open;
};

using HandlerResult = std::variant<Response, StreamAccept>;
using Handler = std::function<HandlerResult(Request&)>;

// ---------------------------------------------------------------------------
// Routing. Patterns are literal path segments or {captures}:
//   "/api/v1/sessions/{session_id}/messages"
class RouteTable {
 public:
  void add(const std::string& method, const std::string& pattern, Handler handler);
  bool empty() const { return routes_.empty(); }

  // Matches method+path, filling request.path_params. nullptr when no route
  // matches.
  const Handler* match(Request& request) const;

 private:
  struct Route {
    std::string method;
    std::vector<std::string> segments;
    Handler handler;
  };
  std::vector<Route> routes_;
};

// Routes a request, mapping unknown routes to a generic 400 and handler
// exceptions to a sanitized 500. Shared by both backends.
HandlerResult dispatch(const RouteTable& routes, Request& request);

// ---------------------------------------------------------------------------
// Client-side view of an open event stream.
class ClientStream {
 public:
  std::vector<SseEvent> events() const;  // all events received so far
  std::size_t event_count() const;

  // Waits until at least n events arrived (immediately true in-process once
  // the server dispatched them). The timeout is real time and exists only to
  // bound loopback delivery; it never affects outcomes of a healthy run.
  bool wait_for_events(std::size_t n, std::chrono::milliseconds timeout) const;

  bool open() const;
  void close();

  // Backend wiring.
  void push(const SseEvent& event);
  void mark_closed();
  void set_close_hook(std::function<void()> hook);

 private:
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<SseEvent> events_;
  bool open_ = true;
  std::function<void()> close_hook_;
};

struct StreamResult {
  int status = 0;  // refusal status; 0 on success
  std::shared_ptr<ClientStream> stream;  // non-null iff accepted

  bool accepted() const { return stream != nullptr; }
};

class Client {
 public:
  virtual ~Client() = default;
  virtual Response request(const Request& request) = 0;
  // target: path with optional ?key=value query, e.g. "/sse/v1/abc?agentId=x".
  virtual StreamResult open_stream(const std::string& target, const Headers& headers = {}) = 0;
};

enum class Backend { InProcess, Loopback };

std::string to_string(Backend b);
std::optional<Backend> backend_from_string(const std::string& s);

class BindFailure : public std::runtime_error {
 public:
  explicit BindFailure(const std::string& what) : std::runtime_error(what) {}
};

class Server {
 public:
  virtual ~Server() = default;
  virtual std::unique_ptr<Client> make_client() = 0;
  virtual void stop() = 0;
  virtual std::uint16_t port() const { return 0; }  // loopback only
};

// Starts serving the route table. Throws std::invalid_argument on an empty
// table and BindFailure when the loopback listener cannot bind.
std::unique_ptr<Server> serve(RouteTable routes, Backend backend);

// Target string helpers shared by backends and attack scripts.
std::string encode_target(const std::string& path, const std::map<std::string, std::string>& query);
void split_target(const std::string& target, std::string& path,
                  std::map<std::string, std::string>& query);

}  // namespace agentsec::wire
