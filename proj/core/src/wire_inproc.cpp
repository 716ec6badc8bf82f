#include <atomic>

#include "agentsec/wire.hpp"

namespace agentsec::wire {

bool valid_status(int status) {
  switch (status) {
    case 200:
    case 400:
    case 401:
    case 403:
    case 409:
    case 422:
    case 429:
    case 500:
      return true;
    default:
      return false;
  }
}

std::string reason_phrase(int status) {
  switch (status) {
    case 200: return "OK";
    case 400: return "Bad Request";
    case 401: return "Unauthorized";
    case 403: return "Forbidden";
    case 409: return "Conflict";
    case 422: return "Unprocessable Entity";
    case 429: return "Too Many Requests";
    case 500: return "Internal Server Error";
    default: return "Unknown";
  }
}

Response make_response(int status, std::string body, Headers headers) {
  if (!valid_status(status)) throw std::invalid_argument("status outside the lab vocabulary");
  Response r;
  r.status = status;
  r.body = std::move(body);
  r.headers = std::move(headers);
  return r;
}

// --- StreamHandle ------------------------------------------------------------

bool StreamHandle::send(const SseEvent& event) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!open_ || !sink_) return false;
  if (!sink_(event)) {
    open_ = false;
    return false;
  }
  return true;
}

void StreamHandle::close() {
  std::function<void()> hook;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!open_) return;
    open_ = false;
    hook = on_close_;
  }
  if (hook) hook();
}

bool StreamHandle::open() const {
  std::lock_guard<std::mutex> lock(mu_);
  return open_;
}

void StreamHandle::set_session(const std::string& session_id) {
  std::lock_guard<std::mutex> lock(mu_);
  session_ = session_id;
}

std::string StreamHandle::session() const {
  std::lock_guard<std::mutex> lock(mu_);
  return session_;
}

void StreamHandle::attach(std::function<bool(const SseEvent&)> sink,
                          std::function<void()> on_close) {
  std::lock_guard<std::mutex> lock(mu_);
  sink_ = std::move(sink);
  on_close_ = std::move(on_close);
}

// --- ClientStream ------------------------------------------------------------

std::vector<SseEvent> ClientStream::events() const {
  std::lock_guard<std::mutex> lock(mu_);
  return events_;
}

std::size_t ClientStream::event_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return events_.size();
}

bool ClientStream::wait_for_events(std::size_t n, std::chrono::milliseconds timeout) const {
  std::unique_lock<std::mutex> lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return events_.size() >= n || !open_; }) &&
         events_.size() >= n;
}

bool ClientStream::open() const {
  std::lock_guard<std::mutex> lock(mu_);
  return open_;
}

void ClientStream::close() {
  std::function<void()> hook;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!open_) return;
    open_ = false;
    hook = close_hook_;
  }
  cv_.notify_all();
  if (hook) hook();
}

void ClientStream::push(const SseEvent& event) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!open_) return;
    events_.push_back(event);
  }
  cv_.notify_all();
}

void ClientStream::mark_closed() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    open_ = false;
  }
  cv_.notify_all();
}

void ClientStream::set_close_hook(std::function<void()> hook) {
  std::lock_guard<std::mutex> lock(mu_);
  close_hook_ = std::move(hook);
}

// --- Routing -----------------------------------------------------------------

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> segments;
  size_t start = 0;
  while (start < path.size()) {
    if (path[start] == '/') {
      ++start;
      continue;
    }
    size_t slash = path.find('/', start);
    if (slash == std::string::npos) {
      segments.push_back(path.substr(start));
      break;
    }
    segments.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return segments;
}

}  // namespace

void RouteTable::add(const std::string& method, const std::string& pattern, Handler handler) {
  Route r;
  r.method = method;
  r.segments = split_path(pattern);
  r.handler = std::move(handler);
  routes_.push_back(std::move(r));
}

const Handler* RouteTable::match(Request& request) const {
  std::vector<std::string> parts = split_path(request.path);
  for (const auto& route : routes_) {
    if (route.method != request.method) continue;
    if (route.segments.size() != parts.size()) continue;
    std::map<std::string, std::string> params;
    bool ok = true;
    for (size_t i = 0; i < parts.size(); ++i) {
      const std::string& seg = route.segments[i];
      if (seg.size() >= 2 && seg.front() == '{' && seg.back() == '}') {
        params[seg.substr(1, seg.size() - 2)] = parts[i];
      } else if (seg != parts[i]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    request.path_params = std::move(params);
    return &route.handler;
  }
  return nullptr;
}

HandlerResult dispatch(const RouteTable& routes, Request& request) {
  const Handler* handler = routes.match(request);
  if (!handler) return make_response(400, kGenericErrorBody);
  try {
    return (*handler)(request);
  } catch (...) {
    // Sanitizer backstop: nothing about the fault leaves the server.
    return make_response(500, kGenericErrorBody);
  }
}

// --- Target helpers ----------------------------------------------------------

namespace {

std::string url_encode(const std::string& raw) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : raw) {
    bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                c == '-' || c == '_' || c == '.' || c == '~';
    if (safe) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string url_decode(const std::string& raw) {
  std::string out;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '%' && i + 2 < raw.size()) {
      int hi = hex_nibble(raw[i + 1]);
      int lo = hex_nibble(raw[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(raw[i]);
  }
  return out;
}

}  // namespace

std::string encode_target(const std::string& path, const std::map<std::string, std::string>& query) {
  std::string target = path;
  bool first = true;
  for (const auto& [k, v] : query) {
    target.push_back(first ? '?' : '&');
    first = false;
    target += url_encode(k);
    target.push_back('=');
    target += url_encode(v);
  }
  return target;
}

void split_target(const std::string& target, std::string& path,
                  std::map<std::string, std::string>& query) {
  query.clear();
  size_t qmark = target.find('?');
  path = target.substr(0, qmark);
  if (qmark == std::string::npos) return;
  std::string qs = target.substr(qmark + 1);
  size_t start = 0;
  while (start <= qs.size()) {
    size_t amp = qs.find('&', start);
    std::string pair = qs.substr(start, amp == std::string::npos ? std::string::npos : amp - start);
    if (!pair.empty()) {
      size_t eq = pair.find('=');
      if (eq == std::string::npos)
        query[url_decode(pair)] = "";
      else
        query[url_decode(pair.substr(0, eq))] = url_decode(pair.substr(eq + 1));
    }
    if (amp == std::string::npos) break;
    start = amp + 1;
  }
}

std::string to_string(Backend b) {
  return b == Backend::InProcess ? "in-process" : "loopback";
}

std::optional<Backend> backend_from_string(const std::string& s) {
  if (s == "in-process") return Backend::InProcess;
  if (s == "loopback") return Backend::Loopback;
  return std::nullopt;
}

// --- In-process backend --------------------------------------------------------

namespace {

class InProcServer;

class InProcClient : public Client {
 public:
  explicit InProcClient(std::shared_ptr<const RouteTable> routes) : routes_(std::move(routes)) {}

  Response request(const Request& request) override {
    Request req = request;
    HandlerResult result = dispatch(*routes_, req);
    if (auto* resp = std::get_if<Response>(&result)) return *resp;
    // A stream upgrade on a plain request makes no sense; refuse generically.
    return make_response(400, kGenericErrorBody);
  }

  StreamResult open_stream(const std::string& target, const Headers& headers) override {
    Request req;
    req.method = "GET";
    req.headers = headers;
    split_target(target, req.path, req.query);
    HandlerResult result = dispatch(*routes_, req);
    if (auto* resp = std::get_if<Response>(&result)) return StreamResult{resp->status, nullptr};

    auto& accept = std::get<StreamAccept>(result);
    auto client_stream = std::make_shared<ClientStream>();
    auto handle = std::make_shared<StreamHandle>(next_stream_id());
    handle->attach(
        [client_stream](const SseEvent& e) {
          if (!client_stream->open()) return false;
          client_stream->push(e);
          return true;
        },
        [client_stream] { client_stream->mark_closed(); });
    client_stream->set_close_hook([handle] { handle->close(); });
    if (accept.on_open) accept.on_open(handle);
    return StreamResult{0, client_stream};
  }

 private:
  static std::uint64_t next_stream_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
  }

  std::shared_ptr<const RouteTable> routes_;
};

class InProcServer : public Server {
 public:
  explicit InProcServer(RouteTable routes)
      : routes_(std::make_shared<const RouteTable>(std::move(routes))) {}

  std::unique_ptr<Client> make_client() override {
    return std::make_unique<InProcClient>(routes_);
  }

  void stop() override {}

 private:
  std::shared_ptr<const RouteTable> routes_;
};

}  // namespace

std::unique_ptr<Server> make_loopback_server(RouteTable routes);  // wire_loopback.cpp

std::unique_ptr<Server> serve(RouteTable routes, Backend backend) {
  if (routes.empty()) throw std::invalid_argument("empty route table");
  if (backend == Backend::InProcess) return std::make_unique<InProcServer>(std::move(routes));
  return make_loopback_server(std::move(routes));
}

}  // namespace agentsec::wire
