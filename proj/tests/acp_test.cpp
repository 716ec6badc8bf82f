// ACP-style SUT: registry pipeline, task validation by signature mode,
// booking agent semantics, leak soundness, posture dominance.
#include "agentsec/acp.hpp"

#include <gtest/gtest.h>

#include <chrono>

#include "agentsec/kvdoc.hpp"
#include "agentsec/multipart.hpp"
#include "agentsec/wire.hpp"

using namespace agentsec;
using acp::AcpPosture;
using acp::AcpServer;
using mime::Part;
using mime::PartRole;

namespace {

constexpr auto kDay = std::chrono::milliseconds(86400000);

struct Lab {
  std::shared_ptr<ManualClock> clock;
  std::shared_ptr<AcpServer> app;
  std::unique_ptr<wire::Server> server;
  std::unique_ptr<wire::Client> client;

  explicit Lab(AcpPosture posture, wire::Backend backend = wire::Backend::InProcess,
               std::uint64_t seed = 42)
      : clock(std::make_shared<ManualClock>()) {
    app = std::make_shared<AcpServer>(posture, clock, seed);
    server = wire::serve(AcpServer::routes(app), backend);
    client = server->make_client();
  }
  ~Lab() {
    if (server) server->stop();
  }
};

// Signs a part in place as key_id; envelope fields must already be set.
Part signed_part(const Lab& lab, const std::string& key_id, Part part) {
  part.signature =
      key_id + ":" + auth::sign(lab.app->key_for(key_id), mime::part_canonical_bytes(part));
  return part;
}

Part instruction(const std::string& body) {
  Part p;
  p.content_type = "text/plain";
  p.role = PartRole::Instruction;
  p.body = body;
  return p;
}

// Instruction with the strict freshness envelope filled in.
Part strict_instruction(const Lab& lab, const std::string& body, const std::string& nonce) {
  Part p = instruction(body);
  p.timestamp_ms = lab.clock->now().count();
  p.nonce = nonce;
  return p;
}

wire::Request task_request(const std::vector<Part>& parts, const std::string& token,
                           const std::string& agent = "booking-agent",
                           const std::string& operation = "book_trip") {
  auto body = mime::encode_multipart(parts, "b1");
  EXPECT_TRUE(body.has_value());
  wire::Request r;
  r.method = "POST";
  r.path = "/tasks";
  r.headers["Authorization"] = "Bearer " + token;
  r.headers["Content-Type"] = "multipart/agent; boundary=b1";
  r.headers["X-Target-Agent"] = agent;
  r.headers["X-Target-Operation"] = operation;
  r.body = body.value_or("");
  return r;
}

wire::Request manifest_request(const std::string& kv_body, const std::string& token) {
  wire::Request r;
  r.method = "POST";
  r.path = "/registry/manifests";
  if (!token.empty()) r.headers["Authorization"] = "Bearer " + token;
  r.body = kv_body;
  return r;
}

std::string client_token(Lab& lab, std::vector<std::string> scopes = {"book_trip",
                                                                      "get_itinerary"}) {
  return lab.app->mint_token("client-1", scopes, kDay);
}

// --------------------------------------------------------------------------
// Presets

TEST(AcpPosture_, PresetsMatchContract) {
  auto partial = AcpPosture::partial();
  EXPECT_EQ(partial.jws_mode, acp::JwsMode::Partial);
  EXPECT_FALSE(partial.registry_rate_limit.has_value());
  EXPECT_TRUE(partial.require_registry_auth);
  EXPECT_TRUE(partial.enforce_scopes);
  EXPECT_FALSE(partial.replay_window.has_value());

  auto strict = AcpPosture::strict();
  EXPECT_EQ(strict.jws_mode, acp::JwsMode::Strict);
  ASSERT_TRUE(strict.registry_rate_limit.has_value());
  EXPECT_EQ(strict.registry_rate_limit->capacity, 5);
  EXPECT_TRUE(strict.require_registry_auth);
  EXPECT_TRUE(strict.enforce_scopes);
  EXPECT_EQ(strict.replay_window.value_or(Duration{0}), Duration{300000});

  auto none = AcpPosture::none();
  EXPECT_EQ(none.jws_mode, acp::JwsMode::None);
  EXPECT_FALSE(none.require_registry_auth);
  EXPECT_FALSE(none.enforce_scopes);
}

// --------------------------------------------------------------------------
// Registry

TEST(AcpRegistry, PartialAcceptsAuthenticatedUnsignedManifest) {
  Lab lab(AcpPosture::partial());
  auto token = lab.app->mint_token("publisher", {"registry:write"}, kDay);
  auto resp = lab.client->request(
      manifest_request("capabilities=echo\nendpoint=/agents/x\nname=client-2\n", token));
  EXPECT_EQ(resp.status, 200);
  ASSERT_TRUE(lab.app->lookup("client-2").has_value());
}

TEST(AcpRegistry, MissingOrBadCredentialsRejected) {
  Lab lab(AcpPosture::partial());
  auto no_auth = lab.client->request(
      manifest_request("capabilities=echo\nendpoint=/x\nname=m\n", ""));
  EXPECT_EQ(no_auth.status, 401);
  auto wrong_scope_token = lab.app->mint_token("publisher", {"book_trip"}, kDay);
  auto wrong_scope = lab.client->request(
      manifest_request("capabilities=echo\nendpoint=/x\nname=m\n", wrong_scope_token));
  EXPECT_EQ(wrong_scope.status, 401);
  auto garbage = lab.client->request(
      manifest_request("capabilities=echo\nendpoint=/x\nname=m\n", "not|a|token"));
  EXPECT_EQ(garbage.status, 401);
  EXPECT_FALSE(lab.app->lookup("m").has_value());
}

TEST(AcpRegistry, NonePostureStoresUnauthenticatedFlood) {
  Lab lab(AcpPosture::none());
  std::size_t before = lab.app->registry_record_count();
  for (int i = 0; i < 1000; ++i) {
    auto resp = lab.client->request(manifest_request(
        "capabilities=junk\nendpoint=/junk\nname=junk-" + std::to_string(i) + "\n", ""));
    ASSERT_EQ(resp.status, 200);
  }
  EXPECT_EQ(lab.app->registry_record_count(), before + 1000);
}

TEST(AcpRegistry, StrictRequiresValidAgentSignature) {
  Lab lab(AcpPosture::strict());
  auto token = lab.app->mint_token("publisher", {"registry:write"}, kDay);

  acp::Manifest manifest;
  manifest.agent_name = "client-2";
  manifest.capabilities = {"echo"};
  manifest.endpoint = "/agents/c2";
  auto sig = "client-2:" +
             auth::sign(lab.app->key_for("client-2"), acp::manifest_canonical_bytes(manifest));

  auto encode = [&manifest](const std::string& signature) {
    kv::Doc doc;
    doc.set("name", manifest.agent_name);
    doc.set_list("capabilities", manifest.capabilities);
    doc.set("endpoint", manifest.endpoint);
    if (!signature.empty()) doc.set("signature", signature);
    return doc.encode();
  };

  // Unsigned → 422.
  EXPECT_EQ(lab.client->request(manifest_request(encode(""), token)).status, 422);
  // Signed by a different trusted principal → 422 (signer must be the agent).
  auto foreign = "client-1:" + auth::sign(lab.app->key_for("client-1"),
                                          acp::manifest_canonical_bytes(manifest));
  EXPECT_EQ(lab.client->request(manifest_request(encode(foreign), token)).status, 422);
  // Valid signature → stored.
  EXPECT_EQ(lab.client->request(manifest_request(encode(sig), token)).status, 200);
  // One tampered byte after signing → 422.
  acp::Manifest tampered = manifest;
  tampered.endpoint = "/agents/c3";
  kv::Doc doc;
  doc.set("name", tampered.agent_name);
  doc.set_list("capabilities", tampered.capabilities);
  doc.set("endpoint", tampered.endpoint);
  doc.set("signature", sig);
  EXPECT_EQ(lab.client->request(manifest_request(doc.encode(), token)).status, 422);
}

TEST(AcpRegistry, StrictBudgetLimitsSignedFlood) {
  Lab lab(AcpPosture::strict());
  auto token = lab.app->mint_token("client-2", {"registry:write"}, kDay);
  auto make_body = [&lab] {
    acp::Manifest manifest;
    manifest.agent_name = "client-2";
    manifest.capabilities = {"echo"};
    manifest.endpoint = "/agents/c2";
    kv::Doc doc;
    doc.set("name", manifest.agent_name);
    doc.set_list("capabilities", manifest.capabilities);
    doc.set("endpoint", manifest.endpoint);
    doc.set("signature",
            "client-2:" + auth::sign(lab.app->key_for("client-2"),
                                     acp::manifest_canonical_bytes(manifest)));
    return doc.encode();
  };
  int stored = 0, limited = 0;
  for (int i = 0; i < 20; ++i) {
    auto resp = lab.client->request(manifest_request(make_body(), token));
    if (resp.status == 200) ++stored;
    if (resp.status == 429) ++limited;
  }
  EXPECT_EQ(stored, 5);
  EXPECT_EQ(limited, 15);
}

TEST(AcpRegistry, LookupReturnsLatestRecord) {
  Lab lab(AcpPosture::none());
  lab.client->request(manifest_request("capabilities=a\nendpoint=/v1\nname=dup\n", ""));
  lab.client->request(manifest_request("capabilities=b\nendpoint=/v2\nname=dup\n", ""));
  wire::Request get;
  get.method = "GET";
  get.path = "/registry/manifests/dup";
  auto resp = lab.client->request(get);
  ASSERT_EQ(resp.status, 200);
  auto doc = kv::Doc::parse(resp.body);
  ASSERT_TRUE(doc.has_value());
  EXPECT_EQ(doc->get("endpoint").value_or(""), "/v2");

  get.path = "/registry/manifests/ghost";
  auto missing = lab.client->request(get);
  EXPECT_EQ(missing.status, 400);
  EXPECT_EQ(missing.body, wire::kGenericErrorBody);
}

// --------------------------------------------------------------------------
// Task pipeline: happy paths

TEST(AcpTask, PartialSignedFirstPartExecutes) {
  Lab lab(AcpPosture::partial());
  auto parts = std::vector<Part>{signed_part(lab, "client-1", instruction("book flight:paris"))};
  auto resp = lab.client->request(task_request(parts, client_token(lab)));
  ASSERT_EQ(resp.status, 200) << resp.body;
  auto ctx = lab.app->context_snapshot();
  ASSERT_EQ(ctx.itinerary.bookings.size(), 1u);
  EXPECT_EQ(ctx.itinerary.bookings[0], "flight:paris");
}

TEST(AcpTask, GetItineraryArtifactRoundTrip) {
  Lab lab(AcpPosture::partial());
  auto parts = std::vector<Part>{signed_part(
      lab, "client-1", instruction("book flight:paris\nset traveler Jordan\nget itinerary"))};
  auto resp = lab.client->request(task_request(parts, client_token(lab)));
  ASSERT_EQ(resp.status, 200);
  auto artifacts = mime::parse_multipart(resp.body, "resp");
  ASSERT_TRUE(artifacts.has_value());
  ASSERT_EQ(artifacts->size(), 1u);
  EXPECT_EQ((*artifacts)[0].role, PartRole::Artifact);
  EXPECT_EQ((*artifacts)[0].body, "booking=flight:paris\nfield.traveler=Jordan\n");
  EXPECT_EQ(resp.body.find("PII-"), std::string::npos);  // benign → no sentinel
}

TEST(AcpTask, StrictHappyPathWithFreshEnvelope) {
  Lab lab(AcpPosture::strict());
  auto parts = std::vector<Part>{
      signed_part(lab, "client-1", strict_instruction(lab, "book hotel:rome", "n-1"))};
  auto resp = lab.client->request(task_request(parts, client_token(lab)));
  ASSERT_EQ(resp.status, 200) << resp.body;
  EXPECT_EQ(lab.app->context_snapshot().itinerary.bookings.size(), 1u);
}

TEST(AcpTask, NoneModeChecksNothing) {
  Lab lab(AcpPosture::none());
  // Unsigned part, token with no matching scope: none posture runs it.
  auto parts = std::vector<Part>{instruction("book bus:lyon")};
  auto token = lab.app->mint_token("anyone", {}, std::nullopt);
  auto resp = lab.client->request(task_request(parts, token));
  EXPECT_EQ(resp.status, 200);
}

// --------------------------------------------------------------------------
// Task pipeline: rejections

TEST(AcpTask, UnregisteredAgentOrUnknownOperationRejected) {
  Lab lab(AcpPosture::partial());
  auto parts = std::vector<Part>{signed_part(lab, "client-1", instruction("book x"))};
  auto r1 = lab.client->request(task_request(parts, client_token(lab), "ghost-agent"));
  EXPECT_EQ(r1.status, 400);
  auto r2 =
      lab.client->request(task_request(parts, client_token(lab), "booking-agent", "rm -rf"));
  EXPECT_EQ(r2.status, 400);
}

TEST(AcpTask, BadAndExpiredTokens401) {
  Lab lab(AcpPosture::partial());
  auto parts = std::vector<Part>{signed_part(lab, "client-1", instruction("book x"))};
  EXPECT_EQ(lab.client->request(task_request(parts, "garbage")).status, 401);

  auto short_lived = lab.app->mint_token("client-1", {"book_trip"}, Duration{1000});
  lab.clock->advance(Duration{1000});
  EXPECT_EQ(lab.client->request(task_request(parts, short_lived)).status, 401);
  EXPECT_TRUE(lab.app->context_snapshot().itinerary.bookings.empty());
}

TEST(AcpTask, ScopeEnforcementPrecedesExecution) {
  Lab lab(AcpPosture::partial());
  auto parts = std::vector<Part>{signed_part(lab, "client-1", instruction("book x"))};
  auto read_only = lab.app->mint_token("client-1", {"get_itinerary"}, kDay);
  auto resp = lab.client->request(task_request(parts, read_only));
  EXPECT_EQ(resp.status, 403);
  EXPECT_EQ(resp.body, "Forbidden");
  EXPECT_TRUE(lab.app->context_snapshot().itinerary.bookings.empty());
}

TEST(AcpTask, StrictRejectsTokenWithoutExpiry) {
  Lab strict(AcpPosture::strict());
  auto immortal = strict.app->mint_token("client-1", {"book_trip"}, std::nullopt);
  auto parts = std::vector<Part>{
      signed_part(strict, "client-1", strict_instruction(strict, "book x", "n-1"))};
  EXPECT_EQ(strict.client->request(task_request(parts, immortal)).status, 401);

  Lab partial(AcpPosture::partial());
  auto immortal2 = partial.app->mint_token("client-1", {"book_trip"}, std::nullopt);
  auto parts2 = std::vector<Part>{signed_part(partial, "client-1", instruction("book x"))};
  EXPECT_EQ(partial.client->request(task_request(parts2, immortal2)).status, 200);
}

TEST(AcpTask, PartialRequiresSignedFirstPart) {
  Lab lab(AcpPosture::partial());
  auto parts = std::vector<Part>{instruction("book x")};  // unsigned
  EXPECT_EQ(lab.client->request(task_request(parts, client_token(lab))).status, 422);
  // Untrusted signer on the first part is as bad as no signature.
  auto mallory = instruction("book x");
  mallory.signature = "mallory:" + auth::sign(auth::make_key("mallory", 42),
                                              mime::part_canonical_bytes(mallory));
  EXPECT_EQ(lab.client->request(task_request({mallory}, client_token(lab))).status, 422);
}

TEST(AcpTask, UnknownInstructionRejectedAtomically) {
  Lab lab(AcpPosture::partial());
  std::string before = lab.app->state_digest();
  auto parts = std::vector<Part>{
      signed_part(lab, "client-1", instruction("book flight:oslo\nlaunch missiles"))};
  auto resp = lab.client->request(task_request(parts, client_token(lab)));
  EXPECT_EQ(resp.status, 422);
  EXPECT_EQ(lab.app->state_digest(), before);  // the valid first line did not commit
}

TEST(AcpTask, EchoUnknownLabelRejected) {
  Lab lab(AcpPosture::partial());
  auto parts = std::vector<Part>{
      signed_part(lab, "client-1", instruction("echo context artifact launch-codes"))};
  EXPECT_EQ(lab.client->request(task_request(parts, client_token(lab))).status, 422);
}

// --------------------------------------------------------------------------
// The three published failures: tamper, replay, exfiltration

TEST(AcpAttackSurface, PartialAcceptsTamperedSecondPart) {
  Lab lab(AcpPosture::partial());
  // Legitimate two-part task, both signed.
  auto p0 = signed_part(lab, "client-1", instruction("book flight:paris"));
  auto p1 = signed_part(lab, "client-1", instruction("set hotel Grand-Plaza"));
  // In-transit adversary rewrites the second part's bytes.
  p1.body = "set hotel Attacker-Inn";
  auto resp = lab.client->request(task_request({p0, p1}, client_token(lab)));
  ASSERT_EQ(resp.status, 200);  // the experimental flaw
  EXPECT_EQ(lab.app->context_snapshot().itinerary.fields.at("hotel"), "Attacker-Inn");
}

TEST(AcpAttackSurface, StrictRejectsSameTamperUnchangedState) {
  Lab lab(AcpPosture::strict());
  auto p0 = signed_part(lab, "client-1", strict_instruction(lab, "book flight:paris", "n-1"));
  auto p1 = signed_part(lab, "client-1", strict_instruction(lab, "set hotel Grand-Plaza", "n-2"));
  p1.body = "set hotel Attacker-Inn";
  std::string before = lab.app->state_digest();
  auto resp = lab.client->request(task_request({p0, p1}, client_token(lab)));
  EXPECT_EQ(resp.status, 422);
  EXPECT_EQ(resp.body, "Unprocessable Entity");
  EXPECT_EQ(lab.app->state_digest(), before);
}

TEST(AcpAttackSurface, PartialAcceptsByteIdenticalReplay) {
  Lab lab(AcpPosture::partial());
  auto request = task_request(
      {signed_part(lab, "client-1", instruction("book flight:paris"))}, client_token(lab));
  EXPECT_EQ(lab.client->request(request).status, 200);
  EXPECT_EQ(lab.client->request(request).status, 200);  // replay lands
  EXPECT_EQ(lab.app->context_snapshot().itinerary.bookings.size(), 2u);
}

TEST(AcpAttackSurface, StrictAnswersReplayWith409) {
  Lab lab(AcpPosture::strict());
  auto request = task_request(
      {signed_part(lab, "client-1", strict_instruction(lab, "book flight:paris", "n-1"))},
      client_token(lab));
  EXPECT_EQ(lab.client->request(request).status, 200);
  auto replay = lab.client->request(request);
  EXPECT_EQ(replay.status, 409);
  EXPECT_EQ(replay.body, "Conflict");
  EXPECT_EQ(lab.app->context_snapshot().itinerary.bookings.size(), 1u);
  // After the replay window the nonce is forgotten — but the timestamp is
  // then stale, so the replay still dies (with 409).
  lab.clock->advance(Duration{300000});
  EXPECT_EQ(lab.client->request(request).status, 409);
}

TEST(AcpAttackSurface, StrictRejectsMissingEnvelopeAndStaleTimestamps) {
  Lab lab(AcpPosture::strict());
  // Signed but without timestamp/nonce → 422.
  auto bare = signed_part(lab, "client-1", instruction("book x"));
  EXPECT_EQ(lab.client->request(task_request({bare}, client_token(lab))).status, 422);
  // Fresh envelope, future timestamp → 409.
  auto future = instruction("book x");
  future.timestamp_ms = lab.clock->now().count() + 1;
  future.nonce = "n-f";
  future = signed_part(lab, "client-1", future);
  EXPECT_EQ(lab.client->request(task_request({future}, client_token(lab))).status, 409);
}

TEST(AcpAttackSurface, PartialLeaksPiiViaInjectedUnsignedPart) {
  Lab lab(AcpPosture::partial());
  auto legit = signed_part(lab, "client-1", instruction("book flight:paris"));
  auto injected = instruction("echo context artifact passport");  // unsigned
  auto resp = lab.client->request(task_request({legit, injected}, client_token(lab)));
  ASSERT_EQ(resp.status, 200);
  EXPECT_NE(resp.body.find("PII-passport-"), std::string::npos);
}

TEST(AcpAttackSurface, StrictBlocksInjectedPartZeroSentinel) {
  Lab lab(AcpPosture::strict());
  auto legit = signed_part(lab, "client-1", strict_instruction(lab, "book flight:paris", "n-1"));
  auto injected = instruction("echo context artifact passport");
  auto resp = lab.client->request(task_request({legit, injected}, client_token(lab)));
  EXPECT_EQ(resp.status, 422);
  EXPECT_EQ(resp.body.find("PII-"), std::string::npos);
}

TEST(AcpAttackSurface, LeakSoundnessSentinelOnlyFromEcho) {
  // The sentinel appears in a response iff an echo instruction executed.
  Lab lab(AcpPosture::partial());
  auto benign = std::vector<Part>{signed_part(
      lab, "client-1", instruction("book flight:paris\nset seat 12A\nget itinerary"))};
  auto r1 = lab.client->request(task_request(benign, client_token(lab)));
  ASSERT_EQ(r1.status, 200);
  EXPECT_EQ(r1.body.find("PII-"), std::string::npos);

  auto echo = std::vector<Part>{
      signed_part(lab, "client-1", instruction("echo context artifact payment"))};
  auto r2 = lab.client->request(task_request(echo, client_token(lab)));
  ASSERT_EQ(r2.status, 200);
  EXPECT_NE(r2.body.find("PII-payment-"), std::string::npos);
}

// --------------------------------------------------------------------------
// Posture dominance

TEST(AcpDominance, StricterPosturesBlockAtLeastAsMuch) {
  // Fixed adversarial script: tamper, replay, inject, scope overreach.
  auto run = [](AcpPosture posture) {
    Lab lab(posture);
    int blocked = 0;

    auto p0 = signed_part(lab, "client-1", strict_instruction(lab, "book flight:paris", "d-1"));
    auto p1 = signed_part(lab, "client-1", strict_instruction(lab, "set hotel Plaza", "d-2"));
    p1.body = "set hotel Attacker-Inn";
    auto tok = lab.app->mint_token("client-1", {"book_trip"}, kDay);
    if (lab.client->request(task_request({p0, p1}, tok)).status != 200) ++blocked;

    auto replayable = task_request(
        {signed_part(lab, "client-1", strict_instruction(lab, "book again", "d-3"))}, tok);
    lab.client->request(replayable);
    if (lab.client->request(replayable).status != 200) ++blocked;

    auto inject = task_request({signed_part(lab, "client-1",
                                            strict_instruction(lab, "book x", "d-4")),
                                instruction("echo context artifact passport")},
                               tok);
    auto r = lab.client->request(inject);
    if (r.status != 200 || r.body.find("PII-") == std::string::npos) ++blocked;

    auto overreach = task_request(
        {signed_part(lab, "client-1", strict_instruction(lab, "get itinerary", "d-5"))}, tok,
        "booking-agent", "get_itinerary");
    if (lab.client->request(overreach).status != 200) ++blocked;

    return blocked;
  };
  int none = run(AcpPosture::none());
  int partial = run(AcpPosture::partial());
  int strict = run(AcpPosture::strict());
  EXPECT_LE(none, partial);
  EXPECT_LE(partial, strict);
  EXPECT_EQ(none, 0);
  EXPECT_EQ(strict, 4);
}

// --------------------------------------------------------------------------
// Reset determinism and loopback parity

TEST(AcpReset, SameSaltReproducesState) {
  Lab lab(AcpPosture::partial());
  auto scenario = [&lab] {
    auto parts = std::vector<Part>{signed_part(lab, "client-1", instruction("book t:1"))};
    lab.client->request(task_request(parts, client_token(lab)));
    return lab.app->state_digest();
  };
  lab.app->reset(3);
  auto first = scenario();
  lab.app->reset(3);
  auto second = scenario();
  EXPECT_EQ(first, second);
  EXPECT_NE(first.find("manifest booking-agent"), std::string::npos);
  EXPECT_NE(first.find("bookings=t:1|"), std::string::npos);
}

TEST(AcpLoopback, ScenarioMatchesInProcess) {
  auto script = [](Lab& lab) {
    std::vector<std::string> log;
    auto token = client_token(lab);
    auto ok = lab.client->request(
        task_request({signed_part(lab, "client-1", instruction("book flight:paris"))}, token));
    log.push_back("ok:" + std::to_string(ok.status) + ":" + ok.body);
    auto tampered_part = signed_part(lab, "client-1", instruction("set hotel Plaza"));
    tampered_part.body = "set hotel Attacker-Inn";
    auto legit = signed_part(lab, "client-1", instruction("book x"));
    auto tamper = lab.client->request(task_request({legit, tampered_part}, token));
    log.push_back("tamper:" + std::to_string(tamper.status));
    auto echo = lab.client->request(task_request(
        {legit, instruction("echo context artifact passport")}, token));
    log.push_back("echo:" + std::to_string(echo.status) + ":" +
                  (echo.body.find("PII-") != std::string::npos ? "leak" : "clean"));
    auto forbidden = lab.client->request(task_request(
        {signed_part(lab, "client-1", instruction("book y"))},
        lab.app->mint_token("client-1", {"get_itinerary"}, kDay)));
    log.push_back("scope:" + std::to_string(forbidden.status));
    return log;
  };
  Lab inproc(AcpPosture::partial(), wire::Backend::InProcess, 7);
  Lab loopback(AcpPosture::partial(), wire::Backend::Loopback, 7);
  EXPECT_EQ(script(inproc), script(loopback));
}

}  // namespace
