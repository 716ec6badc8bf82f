// CORAL-style system under test: a session server where agents join over SSE
// and exchange thread messages. Two posture presets select between the
// behavior as published (privacy key and agent graph accepted unchecked) and
// a hardened variant (both enforced, session-creation budget, message nonce
// window).
//
// Structural properties shared by both postures:
//   * writes are transport-locked: POSTs must cite a transportId that belongs
//     to a live authenticated stream of that session, otherwise the exact
//     compatibility string "Transport not found" comes back with 400 and no
//     state changes;
//   * event dispatch never crosses a session boundary;
//   * every error response is sanitized to a fixed generic body.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agentsec/authsig.hpp"
#include "agentsec/clock.hpp"
#include "agentsec/ids.hpp"
#include "agentsec/kvdoc.hpp"
#include "agentsec/ratelimit.hpp"
#include "agentsec/wire.hpp"

namespace agentsec::coral {

// Frozen wire compatibility string for transport-lock violations.
inline constexpr char kTransportNotFound[] = "Transport not found";

struct CoralPosture {
  bool validate_privacy_key = false;
  bool validate_agent_graph = false;
  std::optional<RateBudget> session_rate_limit;
  std::optional<Duration> message_nonce_window;

  static CoralPosture as_published();
  static CoralPosture hardened();
};

struct Message {
  std::string sender;
  std::string payload;
  std::string nonce;
};

struct ThreadRecord {
  std::string thread_id;
  std::vector<std::string> participants;
  std::vector<Message> messages;  // append-only
};

struct TransportRecord {
  std::string transport_id;
  std::string agent_id;
  wire::StreamHandlePtr stream;

  bool active() const { return stream && stream->open(); }
};

struct SessionRecord {
  std::string session_id;
  std::string privacy_key;  // capability bearer: knowing it = owning it
  std::vector<std::string> agent_graph;
  std::map<std::string, std::string> options;
  std::map<std::string, ThreadRecord> threads;
  std::map<std::string, TransportRecord> transports;
};

class CoralServer {
 public:
  CoralServer(CoralPosture posture, ClockPtr clock, std::uint64_t seed);

  // Route table for wire::serve; handlers forward to the ops below.
  static wire::RouteTable routes(std::shared_ptr<CoralServer> server);

  // POST /api/v1/sessions          body: agents=a,b  option.<NAME>=<value>
  wire::Response create_session(const wire::Request& request);
  // GET /sse/v1/{session_id}?privacyKey=...&agentId=...
  wire::HandlerResult open_sse(const wire::Request& request);
  // POST /api/v1/sessions/{session_id}/threads
  //                                body: transportId=  participants=a,b
  wire::Response create_thread(const wire::Request& request);
  // POST /api/v1/sessions/{session_id}/messages
  //                                body: transportId= threadId= payload= nonce=
  wire::Response post_message(const wire::Request& request);

  enum class AddParticipant { Ok, TransportNotFound, Forbidden, UnknownSession, UnknownThread };
  AddParticipant add_participant(const std::string& session_id, const std::string& transport_id,
                                 const std::string& thread_id, const std::string& agent_id);

  // Clears all session state and reseeds id generation for the given trial.
  void reset(std::uint64_t trial_salt);

  // Introspection for harness and tests.
  std::string state_digest() const;  // deterministic full-state serialization
  bool transport_active(const std::string& session_id, const std::string& transport_id) const;
  std::size_t session_count() const;
  std::vector<std::string> warnings() const;  // as-published mismatch log
  const CoralPosture& posture() const { return posture_; }

 private:
  wire::Response transport_locked(SessionRecord& session, const std::string& transport_id,
                                  const TransportRecord** out) const;
  void dispatch_message(SessionRecord& session, const ThreadRecord& thread, const Message& msg);
  void run_agent_stub(SessionRecord& session, ThreadRecord& thread, const Message& msg);

  const CoralPosture posture_;
  ClockPtr clock_;
  const std::uint64_t seed_;

  mutable std::mutex mu_;
  IdGenerator ids_;
  std::map<std::string, SessionRecord> sessions_;
  std::vector<std::string> warnings_;
  std::unique_ptr<TokenBucket> session_bucket_;
  std::unique_ptr<auth::NonceCache> nonces_;
};

}  // namespace agentsec::coral
