#include "agentsec/coral.hpp"

#include <algorithm>

namespace agentsec::coral {

using wire::kGenericErrorBody;
using wire::make_response;
using wire::Request;
using wire::Response;

CoralPosture CoralPosture::as_published() { return CoralPosture{}; }

CoralPosture CoralPosture::hardened() {
  CoralPosture p;
  p.validate_privacy_key = true;
  p.validate_agent_graph = true;
  p.session_rate_limit = RateBudget{5, 5, std::chrono::milliseconds(60000)};
  p.message_nonce_window = std::chrono::milliseconds(300000);
  return p;
}

CoralServer::CoralServer(CoralPosture posture, ClockPtr clock, std::uint64_t seed)
    : posture_(posture), clock_(std::move(clock)), seed_(seed), ids_(seed) {
  if (posture_.session_rate_limit)
    session_bucket_ = std::make_unique<TokenBucket>(*posture_.session_rate_limit, clock_->now());
  if (posture_.message_nonce_window)
    nonces_ = std::make_unique<auth::NonceCache>(*posture_.message_nonce_window);
}

wire::RouteTable CoralServer::routes(std::shared_ptr<CoralServer> server) {
  wire::RouteTable table;
  table.add("POST", "/api/v1/sessions", [server](Request& r) -> wire::HandlerResult {
    return server->create_session(r);
  });
  table.add("GET", "/sse/v1/{session_id}", [server](Request& r) -> wire::HandlerResult {
    return server->open_sse(r);
  });
  table.add("POST", "/api/v1/sessions/{session_id}/threads",
            [server](Request& r) -> wire::HandlerResult { return server->create_thread(r); });
  table.add("POST", "/api/v1/sessions/{session_id}/messages",
            [server](Request& r) -> wire::HandlerResult { return server->post_message(r); });
  return table;
}

Response CoralServer::create_session(const Request& request) {
  if (session_bucket_ && !session_bucket_->try_acquire(clock_->now()))
    return make_response(429, "Too Many Requests");

  auto body = kv::Doc::parse(request.body);
  if (!body) return make_response(400, kGenericErrorBody);
  auto agents = body->get_list("agents");
  if (agents.empty()) return make_response(400, kGenericErrorBody);

  std::lock_guard<std::mutex> lock(mu_);
  SessionRecord session;
  session.session_id = ids_.next("sid-");
  session.privacy_key = ids_.next("pk-");
  session.agent_graph = agents;
  for (const auto& [key, value] : body->entries()) {
    if (key.rfind("option.", 0) == 0) session.options[key.substr(7)] = value;
  }
  kv::Doc out;
  out.set("sessionId", session.session_id);
  out.set("privacyKey", session.privacy_key);
  sessions_[session.session_id] = std::move(session);
  return make_response(200, out.encode());
}

wire::HandlerResult CoralServer::open_sse(const Request& request) {
  std::string session_id;
  {
    auto it = request.path_params.find("session_id");
    if (it == request.path_params.end()) return make_response(400, kGenericErrorBody);
    session_id = it->second;
  }
  std::string privacy_key;
  std::string agent_id;
  if (auto it = request.query.find("privacyKey"); it != request.query.end())
    privacy_key = it->second;
  if (auto it = request.query.find("agentId"); it != request.query.end()) agent_id = it->second;
  if (agent_id.empty()) return make_response(400, kGenericErrorBody);

  std::lock_guard<std::mutex> lock(mu_);
  auto session_it = sessions_.find(session_id);
  if (session_it == sessions_.end()) return make_response(400, kGenericErrorBody);
  SessionRecord& session = session_it->second;

  bool key_ok = privacy_key == session.privacy_key;
  bool in_graph = std::find(session.agent_graph.begin(), session.agent_graph.end(), agent_id) !=
                  session.agent_graph.end();

  if (!key_ok) {
    if (posture_.validate_privacy_key) return make_response(401, "Unauthorized");
    warnings_.push_back("privacy key mismatch tolerated: session=" + session_id +
                        " agent=" + agent_id);
  }
  if (!in_graph) {
    if (posture_.validate_agent_graph) return make_response(403, "Forbidden");
    warnings_.push_back("agent outside session graph tolerated: session=" + session_id +
                        " agent=" + agent_id);
  }

  wire::StreamAccept accept;
  auto self = this;  // handlers run while the server object is alive
  accept.on_open = [self, session_id, agent_id](wire::StreamHandlePtr handle) {
    std::lock_guard<std::mutex> lock(self->mu_);
    auto it = self->sessions_.find(session_id);
    if (it == self->sessions_.end()) {
      handle->close();
      return;
    }
    TransportRecord transport;
    transport.transport_id = self->ids_.next("tr-");
    transport.agent_id = agent_id;
    transport.stream = handle;
    handle->set_session(session_id);
    kv::Doc hello;
    hello.set("transportId", transport.transport_id);
    handle->send(wire::SseEvent::make("transport", hello.encode()));
    it->second.transports[transport.transport_id] = std::move(transport);
  };
  return accept;
}

// Shared transport-lock check. Returns nullopt-equivalent (status 0) on
// success; otherwise the frozen 400 response. Caller holds mu_.
Response CoralServer::transport_locked(SessionRecord& session, const std::string& transport_id,
                                       const TransportRecord** out) const {
  auto it = session.transports.find(transport_id);
  if (it == session.transports.end() || !it->second.active())
    return make_response(400, kTransportNotFound);
  *out = &it->second;
  return make_response(200, "");
}

Response CoralServer::create_thread(const Request& request) {
  auto param = request.path_params.find("session_id");
  if (param == request.path_params.end()) return make_response(400, kGenericErrorBody);
  auto body = kv::Doc::parse(request.body);
  if (!body) return make_response(400, kGenericErrorBody);
  auto transport_id = body->get("transportId");
  auto participants = body->get_list("participants");
  if (!transport_id || participants.empty()) return make_response(400, kGenericErrorBody);

  std::lock_guard<std::mutex> lock(mu_);
  auto session_it = sessions_.find(param->second);
  if (session_it == sessions_.end()) return make_response(400, kGenericErrorBody);
  SessionRecord& session = session_it->second;

  const TransportRecord* transport = nullptr;
  Response lock_check = transport_locked(session, *transport_id, &transport);
  if (lock_check.status != 200) return lock_check;

  if (posture_.validate_agent_graph) {
    for (const auto& p : participants) {
      if (std::find(session.agent_graph.begin(), session.agent_graph.end(), p) ==
          session.agent_graph.end())
        return make_response(400, kGenericErrorBody);
    }
  }

  ThreadRecord thread;
  thread.thread_id = ids_.next("th-");
  thread.participants = participants;
  kv::Doc out;
  out.set("threadId", thread.thread_id);
  session.threads[thread.thread_id] = std::move(thread);
  return make_response(200, out.encode());
}

Response CoralServer::post_message(const Request& request) {
  auto param = request.path_params.find("session_id");
  if (param == request.path_params.end()) return make_response(400, kGenericErrorBody);
  auto body = kv::Doc::parse(request.body);
  if (!body) return make_response(400, kGenericErrorBody);
  auto transport_id = body->get("transportId");
  auto thread_id = body->get("threadId");
  auto payload = body->get("payload");
  auto nonce = body->get("nonce");
  if (!transport_id || !thread_id || !payload || !nonce)
    return make_response(400, kGenericErrorBody);

  std::lock_guard<std::mutex> lock(mu_);
  auto session_it = sessions_.find(param->second);
  if (session_it == sessions_.end()) return make_response(400, kGenericErrorBody);
  SessionRecord& session = session_it->second;

  // Transport lock first: a forged or stale transport must observe the exact
  // compatibility error and leave no trace, regardless of the rest of the
  // body.
  const TransportRecord* transport = nullptr;
  Response lock_check = transport_locked(session, *transport_id, &transport);
  if (lock_check.status != 200) return lock_check;

  auto thread_it = session.threads.find(*thread_id);
  if (thread_it == session.threads.end()) return make_response(400, kGenericErrorBody);

  if (nonces_ && !nonces_->check_and_record(*nonce, clock_->now()))
    return make_response(400, kGenericErrorBody);

  Message msg;
  msg.sender = transport->agent_id;
  msg.payload = *payload;
  msg.nonce = *nonce;
  thread_it->second.messages.push_back(msg);
  dispatch_message(session, thread_it->second, msg);
  run_agent_stub(session, thread_it->second, msg);

  return make_response(200, "ok=true\n");
}

void CoralServer::dispatch_message(SessionRecord& session, const ThreadRecord& thread,
                                   const Message& msg) {
  kv::Doc event;
  event.set("threadId", thread.thread_id);
  event.set("sender", msg.sender);
  event.set("payload", msg.payload);
  auto frame = wire::SseEvent::make("message", event.encode());
  for (auto& [id, transport] : session.transports) {
    if (!transport.active()) continue;
    if (posture_.validate_agent_graph) {
      // Hardened dispatch is participant-scoped.
      if (std::find(thread.participants.begin(), thread.participants.end(),
                    transport.agent_id) == thread.participants.end())
        continue;
    }
    // As published: every live transport of the session receives the event,
    // including ones admitted with a bad key or an unknown agent id.
    transport.stream->send(frame);
  }
}

// Deterministic stand-in for the model behind a session: sessions created
// with option agent=echo answer "ask:..." messages with "echo:...".
void CoralServer::run_agent_stub(SessionRecord& session, ThreadRecord& thread,
                                 const Message& msg) {
  auto opt = session.options.find("agent");
  if (opt == session.options.end() || opt->second != "echo") return;
  if (msg.payload.rfind("ask:", 0) != 0) return;
  Message reply;
  reply.sender = "assistant";
  reply.payload = "echo:" + msg.payload.substr(4);
  reply.nonce = ids_.next("an-");
  thread.messages.push_back(reply);
  dispatch_message(session, thread, reply);
}

CoralServer::AddParticipant CoralServer::add_participant(const std::string& session_id,
                                                         const std::string& transport_id,
                                                         const std::string& thread_id,
                                                         const std::string& agent_id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto session_it = sessions_.find(session_id);
  if (session_it == sessions_.end()) return AddParticipant::UnknownSession;
  SessionRecord& session = session_it->second;

  auto transport_it = session.transports.find(transport_id);
  if (transport_it == session.transports.end() || !transport_it->second.active())
    return AddParticipant::TransportNotFound;

  auto thread_it = session.threads.find(thread_id);
  if (thread_it == session.threads.end()) return AddParticipant::UnknownThread;
  ThreadRecord& thread = thread_it->second;

  if (posture_.validate_agent_graph) {
    const std::string& adder = transport_it->second.agent_id;
    if (std::find(thread.participants.begin(), thread.participants.end(), adder) ==
        thread.participants.end())
      return AddParticipant::Forbidden;
  }

  if (std::find(thread.participants.begin(), thread.participants.end(), agent_id) ==
      thread.participants.end())
    thread.participants.push_back(agent_id);
  if (std::find(session.agent_graph.begin(), session.agent_graph.end(), agent_id) ==
      session.agent_graph.end())
    session.agent_graph.push_back(agent_id);
  return AddParticipant::Ok;
}

void CoralServer::reset(std::uint64_t trial_salt) {
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& [sid, session] : sessions_) {
    for (auto& [tid, transport] : session.transports) {
      if (transport.stream) transport.stream->close();
    }
  }
  sessions_.clear();
  warnings_.clear();
  ids_.reseed(derive_seed(seed_, trial_salt));
  if (posture_.session_rate_limit)
    session_bucket_ = std::make_unique<TokenBucket>(*posture_.session_rate_limit, clock_->now());
  if (posture_.message_nonce_window)
    nonces_ = std::make_unique<auth::NonceCache>(*posture_.message_nonce_window);
}

std::string CoralServer::state_digest() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string out;
  for (const auto& [sid, session] : sessions_) {
    out += "session " + sid + " key=" + session.privacy_key + "\n";
    out += "  graph=";
    for (const auto& a : session.agent_graph) out += a + ",";
    out += "\n";
    for (const auto& [k, v] : session.options) out += "  option " + k + "=" + v + "\n";
    for (const auto& [tid, thread] : session.threads) {
      out += "  thread " + tid + " participants=";
      for (const auto& p : thread.participants) out += p + ",";
      out += "\n";
      for (const auto& m : thread.messages)
        out += "    msg sender=" + m.sender + " nonce=" + m.nonce + " payload=" + m.payload + "\n";
    }
    for (const auto& [tid, transport] : session.transports)
      out += "  transport " + tid + " agent=" + transport.agent_id +
             (transport.active() ? " active" : " closed") + "\n";
  }
  return out;
}

bool CoralServer::transport_active(const std::string& session_id,
                                   const std::string& transport_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto session_it = sessions_.find(session_id);
  if (session_it == sessions_.end()) return false;
  auto transport_it = session_it->second.transports.find(transport_id);
  return transport_it != session_it->second.transports.end() && transport_it->second.active();
}

std::size_t CoralServer::session_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sessions_.size();
}

std::vector<std::string> CoralServer::warnings() const {
  std::lock_guard<std::mutex> lock(mu_);
  return warnings_;
}

}  // namespace agentsec::coral
