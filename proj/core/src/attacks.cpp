#include "agentsec/attacks.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "agentsec/ids.hpp"
#include "agentsec/kvdoc.hpp"
#include "agentsec/multipart.hpp"

namespace agentsec::attacks {

namespace {

using taxonomy::TrialOutcome;
using taxonomy::VulnerabilityId;

constexpr auto kStreamWait = std::chrono::seconds(5);
constexpr auto kDay = std::chrono::milliseconds(86400000);

TrialOutcome make_outcome(AttackVectorId id, bool success, std::optional<int> status,
                          std::string evidence) {
  TrialOutcome o;
  o.vector_name = to_string(id);
  o.attack_succeeded = success;
  o.impact = success ? 1.0 : 0.0;
  o.observed_status = status;
  o.evidence = std::move(evidence);
  return o;
}

// Attacker-side deterministic randomness, distinct per (config seed, vector,
// trial).
IdGenerator adversary_ids(const AttackConfig& config, AttackVectorId id, int trial) {
  auto vector_salt = static_cast<std::uint64_t>(id) + 1;
  return IdGenerator(derive_seed(derive_seed(config.seed, vector_salt),
                                 static_cast<std::uint64_t>(trial)));
}

// ---------------------------------------------------------------------------
// CORAL wire helpers (the adversary speaks the same protocol as everyone)

struct CoralSession {
  std::string sid;
  std::string pk;
};

std::optional<CoralSession> coral_create_session(wire::Client& client, const std::string& agents,
                                                 const std::string& extra = "") {
  wire::Request r;
  r.method = "POST";
  r.path = "/api/v1/sessions";
  r.body = "agents=" + agents + "\n" + extra;
  auto resp = client.request(r);
  if (resp.status != 200) return std::nullopt;
  auto doc = kv::Doc::parse(resp.body);
  if (!doc) return std::nullopt;
  CoralSession s;
  s.sid = doc->get("sessionId").value_or("");
  s.pk = doc->get("privacyKey").value_or("");
  return s;
}

struct CoralJoin {
  int status = 0;  // 200 when accepted
  std::shared_ptr<wire::ClientStream> stream;
  std::string transport_id;
};

CoralJoin coral_join(wire::Client& client, const std::string& sid, const std::string& pk,
                     const std::string& agent) {
  CoralJoin j;
  auto result = client.open_stream(
      wire::encode_target("/sse/v1/" + sid, {{"privacyKey", pk}, {"agentId", agent}}));
  if (!result.accepted()) {
    j.status = result.status;
    return j;
  }
  j.status = 200;
  j.stream = result.stream;
  if (j.stream->wait_for_events(1, kStreamWait)) {
    auto events = j.stream->events();
    if (auto doc = kv::Doc::parse(events[0].data))
      j.transport_id = doc->get("transportId").value_or("");
  }
  return j;
}

std::string coral_create_thread(wire::Client& client, const std::string& sid,
                                const std::string& transport_id,
                                const std::string& participants) {
  wire::Request r;
  r.method = "POST";
  r.path = "/api/v1/sessions/" + sid + "/threads";
  r.body = "participants=" + participants + "\ntransportId=" + transport_id + "\n";
  auto resp = client.request(r);
  auto doc = kv::Doc::parse(resp.body);
  return doc ? doc->get("threadId").value_or("") : "";
}

std::string coral_message_body(const std::string& transport_id, const std::string& thread_id,
                               const std::string& payload, const std::string& nonce) {
  kv::Doc body;
  body.set("transportId", transport_id);
  body.set("threadId", thread_id);
  body.set("payload", payload);
  body.set("nonce", nonce);
  return body.encode();
}

wire::Response coral_post_message(wire::Client& client, const std::string& sid,
                                  const std::string& body) {
  wire::Request r;
  r.method = "POST";
  r.path = "/api/v1/sessions/" + sid + "/messages";
  r.body = body;
  return client.request(r);
}

// Waits for the SUT to notice a torn-down transport (immediate in-process;
// bounded real time under loopback, where a receive watchdog detects it).
bool wait_transport_inactive(coral::CoralServer& app, const std::string& sid,
                             const std::string& transport_id) {
  auto deadline = std::chrono::steady_clock::now() + kStreamWait;
  while (app.transport_active(sid, transport_id)) {
    if (std::chrono::steady_clock::now() >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return true;
}

bool events_contain(const std::vector<wire::SseEvent>& events, const std::string& needle) {
  return std::any_of(events.begin(), events.end(), [&needle](const wire::SseEvent& e) {
    return e.data.find(needle) != std::string::npos;
  });
}

// A victim party standing up session + stream + thread; most vectors attack
// around this fixture.
struct CoralVictim {
  CoralSession session;
  CoralJoin alice;
  std::string thread_id;
  bool ok = false;
};

CoralVictim coral_victim(wire::Client& client) {
  CoralVictim v;
  auto session = coral_create_session(client, "alice,bob");
  if (!session) return v;
  v.session = *session;
  v.alice = coral_join(client, v.session.sid, v.session.pk, "alice");
  if (v.alice.status != 200 || v.alice.transport_id.empty()) return v;
  v.thread_id = coral_create_thread(client, v.session.sid, v.alice.transport_id, "alice,bob");
  v.ok = !v.thread_id.empty();
  return v;
}

// ---------------------------------------------------------------------------
// ACP wire helpers

mime::Part acp_instruction(const std::string& body) {
  mime::Part p;
  p.content_type = "text/plain";
  p.role = mime::PartRole::Instruction;
  p.body = body;
  return p;
}

mime::Part acp_signed(const acp::AcpServer& app, const std::string& key_id, mime::Part part) {
  part.signature =
      key_id + ":" + auth::sign(app.key_for(key_id), mime::part_canonical_bytes(part));
  return part;
}

// Fully-enveloped signed instruction: valid under every posture.
mime::Part acp_legit_instruction(const acp::AcpServer& app, const Clock& clock,
                                 const std::string& body, const std::string& nonce) {
  mime::Part p = acp_instruction(body);
  p.timestamp_ms = clock.now().count();
  p.nonce = nonce;
  return acp_signed(app, "client-1", p);
}

wire::Request acp_task_request(const std::vector<mime::Part>& parts, const std::string& token,
                               const std::string& operation = "book_trip") {
  wire::Request r;
  r.method = "POST";
  r.path = "/tasks";
  r.headers["Authorization"] = "Bearer " + token;
  r.headers["Content-Type"] = "multipart/agent; boundary=b1";
  r.headers["X-Target-Agent"] = "booking-agent";
  r.headers["X-Target-Operation"] = operation;
  r.body = mime::encode_multipart(parts, "b1").value_or("");
  return r;
}

std::string acp_manifest_body(const acp::AcpServer& app) {
  acp::Manifest manifest;
  manifest.agent_name = "client-2";
  manifest.capabilities = {"echo"};
  manifest.endpoint = "/agents/c2";
  kv::Doc doc;
  doc.set("name", manifest.agent_name);
  doc.set_list("capabilities", manifest.capabilities);
  doc.set("endpoint", manifest.endpoint);
  doc.set("signature", "client-2:" + auth::sign(app.key_for("client-2"),
                                                acp::manifest_canonical_bytes(manifest)));
  return doc.encode();
}

// ---------------------------------------------------------------------------
// CORAL vectors

TrialOutcome sca_impersonation_trial(Lab& lab, const AttackConfig& config, int trial) {
  auto adv = adversary_ids(config, AttackVectorId::ScaImpersonation, trial);
  auto v = coral_victim(*lab.client);
  if (!v.ok) return make_outcome(AttackVectorId::ScaImpersonation, false, std::nullopt,
                                 "victim setup failed");

  std::string wrong_key = adv.next("pk-");
  if (wrong_key == v.session.pk) wrong_key.back() = wrong_key.back() == '0' ? '1' : '0';
  auto attacker = coral_join(*lab.client, v.session.sid, wrong_key, "bob");
  if (attacker.status != 200) {
    v.alice.stream->close();
    return make_outcome(AttackVectorId::ScaImpersonation, false, attacker.status,
                        "refused status=" + std::to_string(attacker.status));
  }
  // Stream stands; pull session traffic to confirm the foothold.
  coral_post_message(*lab.client, v.session.sid,
                     coral_message_body(v.alice.transport_id, v.thread_id,
                                        "quarterly-report draft", "n-sca-" + std::to_string(trial)));
  attacker.stream->wait_for_events(2, kStreamWait);
  std::size_t events = attacker.stream->event_count();
  bool success = events >= 1;
  attacker.stream->close();
  v.alice.stream->close();
  return make_outcome(AttackVectorId::ScaImpersonation, success, 200,
                      "accepted events=" + std::to_string(events));
}

TrialOutcome agent_spoofing_trial(Lab& lab, const AttackConfig& config, int trial) {
  (void)config;
  auto v = coral_victim(*lab.client);
  if (!v.ok) return make_outcome(AttackVectorId::AgentSpoofing, false, std::nullopt,
                                 "victim setup failed");

  // The adversary presents an identity outside the session's agent graph.
  auto attacker = coral_join(*lab.client, v.session.sid, v.session.pk, "spoofed-agent-X");
  if (attacker.status != 200) {
    v.alice.stream->close();
    return make_outcome(AttackVectorId::AgentSpoofing, false, attacker.status,
                        "refused status=" + std::to_string(attacker.status));
  }
  coral_post_message(*lab.client, v.session.sid,
                     coral_message_body(v.alice.transport_id, v.thread_id, "itinerary update",
                                        "n-spoof-" + std::to_string(trial)));
  attacker.stream->wait_for_events(2, kStreamWait);
  auto events = attacker.stream->events();
  bool got_traffic = events_contain(events, "itinerary update");
  bool success = attacker.stream->open() && got_traffic;
  std::string evidence = "accepted events=" + std::to_string(events.size()) +
                         " traffic=" + (got_traffic ? "true" : "false");
  attacker.stream->close();
  v.alice.stream->close();
  return make_outcome(AttackVectorId::AgentSpoofing, success, 200, evidence);
}

TrialOutcome tamper_forge_coral_trial(Lab& lab, const AttackConfig& config, int trial) {
  auto adv = adversary_ids(config, AttackVectorId::TamperForge, trial);
  auto tampers = corpus_of_kind(derive_seed(config.seed, 3), PayloadKind::Tamper);
  const auto& payload = tampers[static_cast<std::size_t>(trial) % tampers.size()];

  auto v = coral_victim(*lab.client);
  if (!v.ok) return make_outcome(AttackVectorId::TamperForge, false, std::nullopt,
                                 "victim setup failed");
  coral_post_message(*lab.client, v.session.sid,
                     coral_message_body(v.alice.transport_id, v.thread_id, "order 100 units",
                                        "n-legit-" + std::to_string(trial)));

  std::string before = lab.coral_app->state_digest();
  // Modified payload under a fabricated transport identity.
  auto resp = coral_post_message(
      *lab.client, v.session.sid,
      coral_message_body(adv.next("tr-"), v.thread_id, payload.text,
                         "n-forge-" + std::to_string(trial)));
  bool changed = lab.coral_app->state_digest() != before;
  bool success = resp.status == 200 && changed;
  v.alice.stream->close();
  return make_outcome(AttackVectorId::TamperForge, success, resp.status,
                      "status=" + std::to_string(resp.status) + " body=" + resp.body +
                          " changed=" + (changed ? "true" : "false"));
}

TrialOutcome replay_message_coral_trial(Lab& lab, const AttackConfig& config, int trial) {
  (void)config;
  auto v = coral_victim(*lab.client);
  if (!v.ok) return make_outcome(AttackVectorId::ReplayMessage, false, std::nullopt,
                                 "victim setup failed");

  // Captured on the wire: one accepted message POST, byte for byte.
  std::string captured = coral_message_body(v.alice.transport_id, v.thread_id, "pay 50 tokens",
                                            "n-replay-" + std::to_string(trial));
  auto first = coral_post_message(*lab.client, v.session.sid, captured);
  if (first.status != 200) {
    v.alice.stream->close();
    return make_outcome(AttackVectorId::ReplayMessage, false, first.status,
                        "capture rejected status=" + std::to_string(first.status));
  }

  // Victim departs; the adversary replays the captured bytes.
  v.alice.stream->close();
  wait_transport_inactive(*lab.coral_app, v.session.sid, v.alice.transport_id);
  std::string before = lab.coral_app->state_digest();
  auto replay = coral_post_message(*lab.client, v.session.sid, captured);
  bool changed = lab.coral_app->state_digest() != before;
  bool success = replay.status == 200 && changed;
  return make_outcome(AttackVectorId::ReplayMessage, success, replay.status,
                      "replay status=" + std::to_string(replay.status) + " body=" + replay.body +
                          " changed=" + (changed ? "true" : "false"));
}

TrialOutcome cross_session_probe_trial(Lab& lab, const AttackConfig& config, int trial) {
  (void)config;
  auto v = coral_victim(*lab.client);
  if (!v.ok) return make_outcome(AttackVectorId::CrossSessionProbe, false, std::nullopt,
                                 "victim setup failed");
  auto foreign = coral_create_session(*lab.client, "mallory");
  if (!foreign) {
    v.alice.stream->close();
    return make_outcome(AttackVectorId::CrossSessionProbe, false, std::nullopt,
                        "attacker setup failed");
  }
  auto attacker = coral_join(*lab.client, foreign->sid, foreign->pk, "mallory");

  // Sentinel-tagged data moves inside the victim session.
  coral_post_message(*lab.client, v.session.sid,
                     coral_message_body(v.alice.transport_id, v.thread_id,
                                        "passport copy PII-cross-" + std::to_string(trial),
                                        "n-cross-" + std::to_string(trial)));
  v.alice.stream->wait_for_events(2, kStreamWait);
  auto events = attacker.stream ? attacker.stream->events() : std::vector<wire::SseEvent>{};
  bool leaked = events_contain(events, "PII-");
  std::string evidence = "attacker_events=" + std::to_string(events.size()) +
                         " sentinel=" + (leaked ? "true" : "false");
  if (attacker.stream) attacker.stream->close();
  v.alice.stream->close();
  return make_outcome(AttackVectorId::CrossSessionProbe, leaked, 200, evidence);
}

TrialOutcome error_probe_trial(Lab& lab, const AttackConfig& config, int trial) {
  (void)config;
  std::vector<wire::Request> probes;
  auto add = [&probes](std::string method, std::string path, std::string body,
                       wire::Headers headers = {}) {
    wire::Request r;
    r.method = std::move(method);
    r.path = std::move(path);
    r.body = std::move(body);
    r.headers = std::move(headers);
    probes.push_back(std::move(r));
  };
  if (lab.sut == Sut::Coral) {
    add("POST", "/api/v1/sessions", "agents");  // unterminated line
    add("POST", "/api/v1/sessions", std::string("\x01\x02\x03", 3));
    add("POST", "/api/v1/ghosts", "x=1\n");
    add("POST", "/api/v1/sessions/sid-missing/messages", "transportId=x\n");
    add("PUT", "/api/v1/sessions", "agents=a\n");
    add("POST", "/api/v1/sessions/sid-missing/threads", "broken");
  } else {
    add("POST", "/tasks", "--b1--\r\n");  // no Content-Type header
    add("POST", "/tasks", "--b1\r\njunk", {{"Content-Type", "multipart/agent; boundary=b1"}});
    add("POST", "/registry/manifests", std::string("\xff\xfe", 2));
    add("GET", "/registry/manifests/ghost-agent", "");
    add("POST", "/ghosts", "x");
    add("POST", "/tasks", "--b2--\r\n", {{"Content-Type", "multipart/agent; boundary=b1"}});
  }
  const auto& probe = probes[static_cast<std::size_t>(trial) % probes.size()];
  auto resp = lab.client->request(probe);

  std::string matched;
  for (const auto& marker : internal_markers()) {
    if (resp.body.find(marker) != std::string::npos) matched = marker;
    for (const auto& [name, value] : resp.headers)
      if (value.find(marker) != std::string::npos) matched = marker;
  }
  bool success = !matched.empty();
  return make_outcome(AttackVectorId::ErrorProbe, success, resp.status,
                      "status=" + std::to_string(resp.status) +
                          " marker=" + (matched.empty() ? "none" : matched));
}

TrialOutcome session_flood_trial(Lab& lab, const AttackConfig& config, int trial) {
  (void)trial;
  int n = config.flood_count;
  std::vector<std::shared_ptr<wire::ClientStream>> streams(static_cast<std::size_t>(n));
  std::vector<int> statuses(static_cast<std::size_t>(n), 0);
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    workers.emplace_back([&lab, &streams, &statuses, i] {
      auto client = lab.server->make_client();
      auto session = coral_create_session(*client, "flood-agent");
      if (!session) {
        statuses[static_cast<std::size_t>(i)] = 429;
        return;
      }
      statuses[static_cast<std::size_t>(i)] = 200;
      auto join = coral_join(*client, session->sid, session->pk, "flood-agent");
      if (join.status == 200) streams[static_cast<std::size_t>(i)] = join.stream;
    });
  }
  for (auto& w : workers) w.join();

  int created = static_cast<int>(std::count(statuses.begin(), statuses.end(), 200));
  int limited = n - created;
  int open = 0;
  for (const auto& s : streams)
    if (s && s->open()) ++open;
  bool success = limited == 0 && created == n && open == n;
  for (auto& s : streams)
    if (s) s->close();
  return make_outcome(AttackVectorId::SessionFlood, success, limited > 0 ? 429 : 200,
                      "created=" + std::to_string(created) + " limited=" +
                          std::to_string(limited) + " streams=" + std::to_string(open));
}

// ---------------------------------------------------------------------------
// ACP vectors

TrialOutcome tamper_forge_acp_trial(Lab& lab, const AttackConfig& config, int trial) {
  auto& app = *lab.acp_app;
  auto tampers = corpus_of_kind(derive_seed(config.seed, 3), PayloadKind::Tamper);
  const auto& payload = tampers[static_cast<std::size_t>(trial) % tampers.size()];
  auto token = app.mint_token("client-1", {"book_trip"}, kDay);

  auto p0 = acp_legit_instruction(app, *config.clock, "book flight:paris",
                                  "n-t0-" + std::to_string(trial));
  auto p1 = acp_legit_instruction(app, *config.clock, "set hotel Grand-Plaza",
                                  "n-t1-" + std::to_string(trial));
  p1.body = payload.text;  // rewritten in transit; signature now stale

  auto resp = lab.client->request(acp_task_request({p0, p1}, token));
  // Success requires the tampered instruction to have taken effect.
  std::string digest = app.state_digest();
  bool applied = false;
  const std::string& line = payload.text;
  if (line.rfind("set ", 0) == 0) {
    auto rest = line.substr(4);
    auto space = rest.find(' ');
    applied = digest.find("itinerary field " + rest.substr(0, space) + "=" +
                          rest.substr(space + 1)) != std::string::npos;
  } else if (line.rfind("book ", 0) == 0) {
    applied = digest.find(line.substr(5) + "|") != std::string::npos;
  }
  bool success = resp.status == 200 && applied;
  return make_outcome(AttackVectorId::TamperForge, success, resp.status,
                      "status=" + std::to_string(resp.status) + " payload=" + payload.name +
                          " applied=" + (applied ? "true" : "false"));
}

TrialOutcome replay_message_acp_trial(Lab& lab, const AttackConfig& config, int trial) {
  auto& app = *lab.acp_app;
  auto token = app.mint_token("client-1", {"book_trip"}, kDay);
  auto request = acp_task_request(
      {acp_legit_instruction(app, *config.clock, "book replay-ticket",
                             "n-rp-" + std::to_string(trial))},
      token);
  auto first = lab.client->request(request);
  if (first.status != 200)
    return make_outcome(AttackVectorId::ReplayMessage, false, first.status,
                        "capture rejected status=" + std::to_string(first.status));
  std::string before = app.state_digest();
  auto replay = lab.client->request(request);  // byte-identical resubmission
  bool changed = app.state_digest() != before;
  bool success = replay.status == 200 && changed;
  return make_outcome(AttackVectorId::ReplayMessage, success, replay.status,
                      "first=200 replay=" + std::to_string(replay.status) +
                          " changed=" + (changed ? "true" : "false"));
}

TrialOutcome pii_exfiltration_trial(Lab& lab, const AttackConfig& config, int trial) {
  auto& app = *lab.acp_app;
  auto exfils = corpus_of_kind(derive_seed(config.seed, 6), PayloadKind::Exfil);
  const auto& payload = exfils[static_cast<std::size_t>(trial) % exfils.size()];
  auto token = app.mint_token("client-1", {"book_trip"}, kDay);

  auto legit = acp_legit_instruction(app, *config.clock, "book flight:paris",
                                     "n-px-" + std::to_string(trial));
  auto injected = acp_instruction(payload.text);  // unsigned rider
  auto resp = lab.client->request(acp_task_request({legit, injected}, token));
  bool leak = resp.body.find("PII-") != std::string::npos;
  bool success = resp.status == 200 && leak;
  return make_outcome(AttackVectorId::PiiExfiltration, success, resp.status,
                      "status=" + std::to_string(resp.status) + " payload=" + payload.name +
                          " leak=" + (leak ? "true" : "false"));
}

TrialOutcome registry_flood_trial(Lab& lab, const AttackConfig& config, int trial) {
  (void)trial;
  auto& app = *lab.acp_app;
  auto token = app.mint_token("client-2", {"registry:write"}, kDay);
  std::string body = acp_manifest_body(app);

  int n = config.flood_count;
  std::vector<int> statuses(static_cast<std::size_t>(n), 0);
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    workers.emplace_back([&lab, &statuses, &token, &body, i] {
      auto client = lab.server->make_client();
      wire::Request r;
      r.method = "POST";
      r.path = "/registry/manifests";
      r.headers["Authorization"] = "Bearer " + token;
      r.body = body;
      statuses[static_cast<std::size_t>(i)] = client->request(r).status;
    });
  }
  for (auto& w : workers) w.join();

  int stored = static_cast<int>(std::count(statuses.begin(), statuses.end(), 200));
  int limited = static_cast<int>(std::count(statuses.begin(), statuses.end(), 429));
  bool success = limited == 0 && stored == n;
  return make_outcome(AttackVectorId::RegistryFlood, success, limited > 0 ? 429 : 200,
                      "stored=" + std::to_string(stored) + " limited=" + std::to_string(limited) +
                          " records=" + std::to_string(app.registry_record_count()));
}

TrialOutcome scope_overreach_trial(Lab& lab, const AttackConfig& config, int trial) {
  auto& app = *lab.acp_app;
  // Read-scoped credential invoking the write operation.
  auto token = app.mint_token("client-1", {"get_itinerary"}, kDay);
  auto part = acp_legit_instruction(app, *config.clock, "book flight:paris",
                                    "n-so-" + std::to_string(trial));
  auto resp = lab.client->request(acp_task_request({part}, token, "book_trip"));
  bool success = resp.status == 200;
  return make_outcome(AttackVectorId::ScopeOverreach, success, resp.status,
                      "status=" + std::to_string(resp.status));
}

TrialOutcome token_lifetime_abuse_trial(Lab& lab, const AttackConfig& config, int trial) {
  auto& app = *lab.acp_app;
  auto immortal = app.mint_token("client-1", {"book_trip"}, std::nullopt);
  auto first = lab.client->request(acp_task_request(
      {acp_legit_instruction(app, *config.clock, "book first-leg",
                             "n-tl1-" + std::to_string(trial))},
      immortal));
  // Far beyond any sane credential lifetime.
  config.clock->advance(30 * kDay);
  auto reuse = lab.client->request(acp_task_request(
      {acp_legit_instruction(app, *config.clock, "book second-leg",
                             "n-tl2-" + std::to_string(trial))},
      immortal));
  bool success = reuse.status == 200;
  return make_outcome(AttackVectorId::TokenLifetimeAbuse, success, reuse.status,
                      "first=" + std::to_string(first.status) +
                          " reuse=" + std::to_string(reuse.status));
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Sut sut) { return sut == Sut::Coral ? "coral" : "acp"; }

std::optional<Sut> sut_from_string(const std::string& s) {
  if (s == "coral") return Sut::Coral;
  if (s == "acp") return Sut::Acp;
  return std::nullopt;
}

std::string to_string(AttackVectorId id) {
  switch (id) {
    case AttackVectorId::ScaImpersonation: return "ScaImpersonation";
    case AttackVectorId::AgentSpoofing: return "AgentSpoofing";
    case AttackVectorId::TamperForge: return "TamperForge";
    case AttackVectorId::ReplayMessage: return "ReplayMessage";
    case AttackVectorId::CrossSessionProbe: return "CrossSessionProbe";
    case AttackVectorId::PiiExfiltration: return "PiiExfiltration";
    case AttackVectorId::ErrorProbe: return "ErrorProbe";
    case AttackVectorId::SessionFlood: return "SessionFlood";
    case AttackVectorId::RegistryFlood: return "RegistryFlood";
    case AttackVectorId::ScopeOverreach: return "ScopeOverreach";
    case AttackVectorId::TokenLifetimeAbuse: return "TokenLifetimeAbuse";
  }
  return "ScaImpersonation";
}

std::optional<AttackVectorId> vector_from_string(const std::string& s) {
  for (const auto& row : vector_table())
    if (to_string(row.id) == s) return row.id;
  return std::nullopt;
}

const std::vector<VectorInfo>& vector_table() {
  using V = AttackVectorId;
  using Vul = VulnerabilityId;
  static const std::vector<VectorInfo> table = {
      //  id                    maps_to                  coral  acp    evidence_only
      {V::ScaImpersonation, Vul::Sca, true, false, false},
      {V::AgentSpoofing, Vul::DiscoverySpoofing, true, false, false},
      {V::TamperForge, Vul::TamperMitm, true, true, false},
      {V::ReplayMessage, Vul::TamperMitm, true, true, false},
      {V::CrossSessionProbe, Vul::ExcessiveExposure, true, false, false},
      {V::PiiExfiltration, Vul::ExcessiveExposure, false, true, false},
      {V::ErrorProbe, Vul::SelfDisclosure, true, true, true},
      {V::SessionFlood, Vul::RegistryDos, true, false, false},
      {V::RegistryFlood, Vul::RegistryDos, false, true, false},
      {V::ScopeOverreach, Vul::GranularScopes, false, true, false},
      {V::TokenLifetimeAbuse, Vul::TokenLifetime, false, true, false},
  };
  return table;
}

const VectorInfo& info(AttackVectorId id) {
  for (const auto& row : vector_table())
    if (row.id == id) return row;
  return vector_table().front();  // unreachable: table covers the enum
}

bool applicable(AttackVectorId id, Sut sut) {
  const auto& row = info(id);
  return sut == Sut::Coral ? row.coral_applicable : row.acp_applicable;
}

const std::vector<std::string>& internal_markers() {
  static const std::vector<std::string> markers = {"at ", ".kt:", "version", "Exception"};
  return markers;
}

Lab make_coral_lab(coral::CoralPosture posture, wire::Backend backend,
                   std::shared_ptr<ManualClock> clock, std::uint64_t seed) {
  Lab lab;
  lab.sut = Sut::Coral;
  lab.coral_app = std::make_shared<coral::CoralServer>(posture, clock, seed);
  lab.server = wire::serve(coral::CoralServer::routes(lab.coral_app), backend);
  lab.client = lab.server->make_client();
  return lab;
}

Lab make_acp_lab(acp::AcpPosture posture, wire::Backend backend,
                 std::shared_ptr<ManualClock> clock, std::uint64_t seed) {
  Lab lab;
  lab.sut = Sut::Acp;
  lab.acp_app = std::make_shared<acp::AcpServer>(posture, clock, seed);
  lab.server = wire::serve(acp::AcpServer::routes(lab.acp_app), backend);
  lab.client = lab.server->make_client();
  return lab;
}

std::vector<taxonomy::TrialOutcome> run_vector(AttackVectorId id, Lab& lab,
                                               const AttackConfig& config) {
  if (!applicable(id, lab.sut))
    throw VectorNotApplicable(to_string(id) + " does not target " + to_string(lab.sut));
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!config.clock) throw std::invalid_argument("config.clock is required");

  std::vector<taxonomy::TrialOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(config.trials));
  for (int trial = 0; trial < config.trials; ++trial) {
    if (lab.sut == Sut::Coral)
      lab.coral_app->reset(static_cast<std::uint64_t>(trial));
    else
      lab.acp_app->reset(static_cast<std::uint64_t>(trial));

    TrialOutcome outcome;
    switch (id) {
      case AttackVectorId::ScaImpersonation:
        outcome = sca_impersonation_trial(lab, config, trial);
        break;
      case AttackVectorId::AgentSpoofing:
        outcome = agent_spoofing_trial(lab, config, trial);
        break;
      case AttackVectorId::TamperForge:
        outcome = lab.sut == Sut::Coral ? tamper_forge_coral_trial(lab, config, trial)
                                        : tamper_forge_acp_trial(lab, config, trial);
        break;
      case AttackVectorId::ReplayMessage:
        outcome = lab.sut == Sut::Coral ? replay_message_coral_trial(lab, config, trial)
                                        : replay_message_acp_trial(lab, config, trial);
        break;
      case AttackVectorId::CrossSessionProbe:
        outcome = cross_session_probe_trial(lab, config, trial);
        break;
      case AttackVectorId::PiiExfiltration:
        outcome = pii_exfiltration_trial(lab, config, trial);
        break;
      case AttackVectorId::ErrorProbe:
        outcome = error_probe_trial(lab, config, trial);
        break;
      case AttackVectorId::SessionFlood:
        outcome = session_flood_trial(lab, config, trial);
        break;
      case AttackVectorId::RegistryFlood:
        outcome = registry_flood_trial(lab, config, trial);
        break;
      case AttackVectorId::ScopeOverreach:
        outcome = scope_overreach_trial(lab, config, trial);
        break;
      case AttackVectorId::TokenLifetimeAbuse:
        outcome = token_lifetime_abuse_trial(lab, config, trial);
        break;
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

}  // namespace agentsec::attacks
