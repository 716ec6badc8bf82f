// ACP-style system under test: a manifest registry plus a multipart task
// endpoint in front of a deterministic booking agent that holds synthetic
// PII. The pivotal posture knob is how much of each task's per-part
// signature envelope is verified:
//
//   none    — nothing checked;
//   partial — only the FIRST part's signature is verified, later parts are
//             accepted unverified (the deliberately weak deployment);
//   strict  — every part verified, freshness envelope (timestamp + nonce)
//             required, replays answered with 409.
//
// Wire surface (exact header names; multipart grammar in multipart.hpp):
//   POST /registry/manifests          KV body, Authorization: Bearer <token>
//   GET  /registry/manifests/{name}
//   POST /tasks                       multipart body; headers Authorization,
//                                     Content-Type (carries boundary),
//                                     X-Target-Agent, X-Target-Operation
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
#include "agentsec/multipart.hpp"
#include "agentsec/ratelimit.hpp"
#include "agentsec/wire.hpp"

namespace agentsec::acp {

enum class JwsMode { None, Partial, Strict };

std::string to_string(JwsMode mode);
std::optional<JwsMode> jws_mode_from_string(const std::string& s);

struct AcpPosture {
  JwsMode jws_mode = JwsMode::None;
  std::optional<RateBudget> registry_rate_limit;
  bool require_registry_auth = false;
  bool enforce_scopes = false;
  std::optional<Duration> replay_window;

  static AcpPosture none();     // everything off
  static AcpPosture partial();  // the experimental deployment
  static AcpPosture strict();   // full envelope enforcement
};

struct Manifest {
  std::string agent_name;
  std::vector<std::string> capabilities;
  std::string endpoint;
  std::optional<std::string> signature;  // "<key_id>:<hex>"

  bool operator==(const Manifest&) const = default;
};

// Bytes covered by a manifest signature (excludes the signature itself).
std::string manifest_canonical_bytes(const Manifest& manifest);

struct Itinerary {
  std::vector<std::string> bookings;
  std::map<std::string, std::string> fields;
};

// The booking agent's working memory: synthetic sensitive artifacts (every
// value carries the "PII-" sentinel prefix so leaks are mechanically
// detectable) plus mutable itinerary state.
struct AgentContext {
  std::map<std::string, std::string> pii_artifacts;
  Itinerary itinerary;
};

class AcpServer {
 public:
  AcpServer(AcpPosture posture, ClockPtr clock, std::uint64_t seed);

  static wire::RouteTable routes(std::shared_ptr<AcpServer> server);

  // POST /registry/manifests
  //   body: name= capabilities= endpoint= [signature=]
  //   pipeline: credentials (401) → strict manifest signature (422) →
  //             rate budget (429) → stored
  wire::Response register_manifest(const wire::Request& request);
  // GET /registry/manifests/{name} — latest record for the name.
  wire::Response lookup_manifest(const wire::Request& request);
  // POST /tasks
  //   pipeline: target registered (400) → token (401/403) → parts per
  //             jws_mode (422) → strict freshness/replay (409) → execute;
  //   success: 200 multipart of role=artifact parts (boundary "resp").
  wire::Response submit_task(const wire::Request& request);

  // ------------------------------------------------------------------
  // Lab credential authority. Keys are derived deterministically from the
  // construction seed; the server trusts exactly the principals below for
  // part/manifest signatures. Scripts playing legitimate parties use these
  // helpers; adversaries, by definition, hold no trusted key and cannot
  // mint tokens.
  static const std::vector<std::string>& trusted_signers();
  auth::SigningKey key_for(const std::string& key_id) const;
  std::string mint_token(const std::string& subject, const std::vector<std::string>& scopes,
                         std::optional<Duration> ttl);

  // Seeds the default deployment: the booking agent's manifest, registered
  // out of band (does not consume the registry budget).
  void install_default_manifest();

  void reset(std::uint64_t trial_salt);

  // Introspection for harness and tests.
  std::string state_digest() const;
  std::size_t registry_record_count() const;  // pollution metric
  std::optional<Manifest> lookup(const std::string& name) const;
  AgentContext context_snapshot() const;
  const AcpPosture& posture() const { return posture_; }

 private:
  bool verify_detached(const std::string& signature, const std::string& canonical) const;
  wire::Response execute_task(const std::vector<mime::Part>& parts);

  const AcpPosture posture_;
  ClockPtr clock_;
  const std::uint64_t seed_;

  mutable std::mutex mu_;
  IdGenerator ids_;
  std::map<std::string, std::vector<Manifest>> registry_;
  std::size_t registry_records_ = 0;
  AgentContext context_;
  std::unique_ptr<TokenBucket> registry_bucket_;
  std::unique_ptr<auth::NonceCache> part_nonces_;
};

}  // namespace agentsec::acp
