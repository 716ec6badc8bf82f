#include "agentsec/acp.hpp"

#include <algorithm>

#include "agentsec/kvdoc.hpp"

namespace agentsec::acp {

using wire::kGenericErrorBody;
using wire::make_response;
using wire::Request;
using wire::Response;

namespace {

constexpr char kAuthorityKeyId[] = "authority";
constexpr char kRegistryScope[] = "registry:write";
constexpr char kResponseBoundary[] = "resp";

// Synthetic sensitive artifacts. The sentinel prefix makes any leak
// mechanically detectable in a response body.
AgentContext fresh_context() {
  AgentContext ctx;
  ctx.pii_artifacts["passport"] = "PII-passport-K7421-8830";
  ctx.pii_artifacts["payment"] = "PII-payment-4111-7312-0094";
  return ctx;
}

std::string itinerary_kv(const Itinerary& itinerary) {
  kv::Doc doc;
  if (!itinerary.bookings.empty()) doc.set_list("booking", itinerary.bookings);
  for (const auto& [field, value] : itinerary.fields) doc.set("field." + field, value);
  return doc.encode();
}

std::vector<std::string> instruction_lines(const std::string& body) {
  std::string normalized;
  normalized.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\r' && i + 1 < body.size() && body[i + 1] == '\n') continue;
    normalized += body[i];
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= normalized.size()) {
    auto end = normalized.find('\n', start);
    if (end == std::string::npos) end = normalized.size();
    std::string line = normalized.substr(start, end - start);
    if (!line.empty()) lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

const std::string* header(const Request& request, const std::string& name) {
  auto it = request.headers.find(name);
  return it == request.headers.end() ? nullptr : &it->second;
}

std::optional<std::string> bearer(const Request& request) {
  const std::string* value = header(request, "Authorization");
  if (!value) return std::nullopt;
  const std::string prefix = "Bearer ";
  if (value->rfind(prefix, 0) != 0) return std::nullopt;
  return value->substr(prefix.size());
}

}  // namespace

std::string to_string(JwsMode mode) {
  switch (mode) {
    case JwsMode::None: return "none";
    case JwsMode::Partial: return "partial";
    case JwsMode::Strict: return "strict";
  }
  return "none";
}

std::optional<JwsMode> jws_mode_from_string(const std::string& s) {
  if (s == "none") return JwsMode::None;
  if (s == "partial") return JwsMode::Partial;
  if (s == "strict") return JwsMode::Strict;
  return std::nullopt;
}

AcpPosture AcpPosture::none() { return AcpPosture{}; }

AcpPosture AcpPosture::partial() {
  AcpPosture p;
  p.jws_mode = JwsMode::Partial;
  p.require_registry_auth = true;
  p.enforce_scopes = true;
  return p;
}

AcpPosture AcpPosture::strict() {
  AcpPosture p;
  p.jws_mode = JwsMode::Strict;
  p.registry_rate_limit = RateBudget{5, 5, std::chrono::milliseconds(60000)};
  p.require_registry_auth = true;
  p.enforce_scopes = true;
  p.replay_window = std::chrono::milliseconds(300000);
  return p;
}

std::string manifest_canonical_bytes(const Manifest& manifest) {
  std::string out = "manifest.v1\n";
  out += manifest.agent_name + "\n";
  for (std::size_t i = 0; i < manifest.capabilities.size(); ++i) {
    if (i) out += ",";
    out += manifest.capabilities[i];
  }
  out += "\n" + manifest.endpoint + "\n";
  return out;
}

AcpServer::AcpServer(AcpPosture posture, ClockPtr clock, std::uint64_t seed)
    : posture_(posture), clock_(std::move(clock)), seed_(seed), ids_(seed),
      context_(fresh_context()) {
  if (posture_.registry_rate_limit)
    registry_bucket_ = std::make_unique<TokenBucket>(*posture_.registry_rate_limit, clock_->now());
  if (posture_.replay_window)
    part_nonces_ = std::make_unique<auth::NonceCache>(*posture_.replay_window);
  install_default_manifest();
}

wire::RouteTable AcpServer::routes(std::shared_ptr<AcpServer> server) {
  wire::RouteTable table;
  table.add("POST", "/registry/manifests", [server](Request& r) -> wire::HandlerResult {
    return server->register_manifest(r);
  });
  table.add("GET", "/registry/manifests/{name}", [server](Request& r) -> wire::HandlerResult {
    return server->lookup_manifest(r);
  });
  table.add("POST", "/tasks",
            [server](Request& r) -> wire::HandlerResult { return server->submit_task(r); });
  return table;
}

const std::vector<std::string>& AcpServer::trusted_signers() {
  static const std::vector<std::string> signers = {"booking-agent", "client-1", "client-2"};
  return signers;
}

auth::SigningKey AcpServer::key_for(const std::string& key_id) const {
  return auth::make_key(key_id, seed_);
}

std::string AcpServer::mint_token(const std::string& subject,
                                  const std::vector<std::string>& scopes,
                                  std::optional<Duration> ttl) {
  std::lock_guard<std::mutex> lock(mu_);
  auto token =
      auth::issue_token(key_for(kAuthorityKeyId), subject, scopes, *clock_, ttl, ids_.next("tn-"));
  return auth::token_wire(token);
}

void AcpServer::install_default_manifest() {
  std::lock_guard<std::mutex> lock(mu_);
  Manifest manifest;
  manifest.agent_name = "booking-agent";
  manifest.capabilities = {"book_trip", "get_itinerary"};
  manifest.endpoint = "/agents/booking";
  manifest.signature =
      "booking-agent:" + auth::sign(key_for("booking-agent"), manifest_canonical_bytes(manifest));
  registry_[manifest.agent_name].push_back(std::move(manifest));
  ++registry_records_;
}

bool AcpServer::verify_detached(const std::string& signature, const std::string& canonical) const {
  auto colon = signature.find(':');
  if (colon == std::string::npos) return false;
  std::string key_id = signature.substr(0, colon);
  std::string hex = signature.substr(colon + 1);
  const auto& trusted = trusted_signers();
  if (std::find(trusted.begin(), trusted.end(), key_id) == trusted.end()) return false;
  return auth::verify(key_for(key_id), canonical, hex);
}

Response AcpServer::register_manifest(const Request& request) {
  if (posture_.require_registry_auth) {
    auto token = bearer(request);
    if (!token) return make_response(401, "Unauthorized");
    auto check = auth::validate_token_wire(key_for(kAuthorityKeyId), *token, *clock_,
                                           std::string(kRegistryScope));
    if (check != auth::TokenCheck::Ok) return make_response(401, "Unauthorized");
  }

  auto body = kv::Doc::parse(request.body);
  if (!body) return make_response(400, kGenericErrorBody);
  auto name = body->get("name");
  auto capabilities = body->get_list("capabilities");
  auto endpoint = body->get("endpoint");
  if (!name || name->empty() || capabilities.empty() || !endpoint)
    return make_response(400, kGenericErrorBody);

  Manifest manifest;
  manifest.agent_name = *name;
  manifest.capabilities = capabilities;
  manifest.endpoint = *endpoint;
  if (auto sig = body->get("signature")) manifest.signature = *sig;

  if (posture_.jws_mode == JwsMode::Strict) {
    if (!manifest.signature) return make_response(422, "Unprocessable Entity");
    // The signer must be the named agent itself.
    if (manifest.signature->rfind(manifest.agent_name + ":", 0) != 0)
      return make_response(422, "Unprocessable Entity");
    if (!verify_detached(*manifest.signature, manifest_canonical_bytes(manifest)))
      return make_response(422, "Unprocessable Entity");
  }

  if (registry_bucket_ && !registry_bucket_->try_acquire(clock_->now()))
    return make_response(429, "Too Many Requests");

  std::lock_guard<std::mutex> lock(mu_);
  auto& records = registry_[manifest.agent_name];
  records.push_back(std::move(manifest));
  ++registry_records_;
  kv::Doc out;
  out.set("ok", "true");
  out.set("records", std::to_string(records.size()));
  return make_response(200, out.encode());
}

Response AcpServer::lookup_manifest(const Request& request) {
  auto param = request.path_params.find("name");
  if (param == request.path_params.end()) return make_response(400, kGenericErrorBody);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = registry_.find(param->second);
  if (it == registry_.end() || it->second.empty()) return make_response(400, kGenericErrorBody);
  const Manifest& manifest = it->second.back();
  kv::Doc out;
  out.set("name", manifest.agent_name);
  out.set_list("capabilities", manifest.capabilities);
  out.set("endpoint", manifest.endpoint);
  if (manifest.signature) out.set("signature", *manifest.signature);
  return make_response(200, out.encode());
}

Response AcpServer::submit_task(const Request& request) {
  // Frame: boundary comes from the Content-Type header.
  const std::string* content_type = header(request, "Content-Type");
  if (!content_type) return make_response(400, kGenericErrorBody);
  auto boundary = mime::parse_boundary(*content_type);
  if (!boundary) return make_response(400, kGenericErrorBody);
  auto parts = mime::parse_multipart(request.body, *boundary);
  if (!parts || parts->empty()) return make_response(400, kGenericErrorBody);

  const std::string* agent_name = header(request, "X-Target-Agent");
  const std::string* operation = header(request, "X-Target-Operation");
  if (!agent_name || !operation) return make_response(400, kGenericErrorBody);

  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = registry_.find(*agent_name);
    if (it == registry_.end() || it->second.empty()) return make_response(400, kGenericErrorBody);
    const auto& caps = it->second.back().capabilities;
    if (std::find(caps.begin(), caps.end(), *operation) == caps.end())
      return make_response(400, kGenericErrorBody);
  }

  // Token pipeline: signature, expiry, then scope.
  auto token_wire = bearer(request);
  if (!token_wire) return make_response(401, "Unauthorized");
  std::optional<std::string> required_scope;
  if (posture_.enforce_scopes) required_scope = *operation;
  auto check =
      auth::validate_token_wire(key_for(kAuthorityKeyId), *token_wire, *clock_, required_scope);
  if (check == auth::TokenCheck::BadSignature || check == auth::TokenCheck::Expired)
    return make_response(401, "Unauthorized");
  if (check == auth::TokenCheck::ScopeDenied) return make_response(403, "Forbidden");
  if (posture_.jws_mode == JwsMode::Strict) {
    // Strict deployments refuse unbounded credentials outright.
    auto token = auth::parse_token_wire(*token_wire);
    if (!token || !token->expires_at) return make_response(401, "Unauthorized");
  }

  // Per-part signature verification, by posture.
  switch (posture_.jws_mode) {
    case JwsMode::None:
      break;
    case JwsMode::Partial:
      // Only the first part is verified; later parts ride along unchecked.
      if (!(*parts)[0].signature ||
          !verify_detached(*(*parts)[0].signature, mime::part_canonical_bytes((*parts)[0])))
        return make_response(422, "Unprocessable Entity");
      break;
    case JwsMode::Strict:
      for (const auto& part : *parts) {
        if (!part.signature || !part.timestamp_ms || !part.nonce)
          return make_response(422, "Unprocessable Entity");
        if (!verify_detached(*part.signature, mime::part_canonical_bytes(part)))
          return make_response(422, "Unprocessable Entity");
      }
      break;
  }

  // Strict freshness: all timestamps inside the window first, then nonce
  // replay memory.
  if (posture_.jws_mode == JwsMode::Strict && posture_.replay_window) {
    Instant now = clock_->now();
    for (const auto& part : *parts) {
      Instant ts{*part.timestamp_ms};
      if (ts > now || now - ts >= *posture_.replay_window) return make_response(409, "Conflict");
    }
    for (const auto& part : *parts)
      if (!part_nonces_->check_and_record(*part.nonce, now)) return make_response(409, "Conflict");
  }

  return execute_task(*parts);
}

Response AcpServer::execute_task(const std::vector<mime::Part>& parts) {
  std::lock_guard<std::mutex> lock(mu_);
  // Instructions run against a scratch itinerary committed only on full
  // success, so a rejected task leaves no trace.
  Itinerary scratch = context_.itinerary;
  std::vector<mime::Part> artifacts;

  for (const auto& part : parts) {
    if (part.role != mime::PartRole::Instruction) continue;
    for (const auto& line : instruction_lines(part.body)) {
      if (line == "get itinerary") {
        mime::Part artifact;
        artifact.content_type = "application/kv";
        artifact.role = mime::PartRole::Artifact;
        artifact.body = itinerary_kv(scratch);
        artifacts.push_back(std::move(artifact));
      } else if (line.rfind("book ", 0) == 0 && line.size() > 5) {
        scratch.bookings.push_back(line.substr(5));
      } else if (line.rfind("set ", 0) == 0) {
        auto rest = line.substr(4);
        auto space = rest.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 >= rest.size())
          return make_response(422, "Unprocessable Entity");
        scratch.fields[rest.substr(0, space)] = rest.substr(space + 1);
      } else if (line.rfind("echo context artifact ", 0) == 0) {
        auto label = line.substr(22);
        auto it = context_.pii_artifacts.find(label);
        if (it == context_.pii_artifacts.end())
          return make_response(422, "Unprocessable Entity");
        mime::Part artifact;
        artifact.content_type = "text/plain";
        artifact.role = mime::PartRole::Artifact;
        artifact.body = it->second;
        artifacts.push_back(std::move(artifact));
      } else {
        return make_response(422, "Unprocessable Entity");
      }
    }
  }

  context_.itinerary = std::move(scratch);
  auto body = mime::encode_multipart(artifacts, kResponseBoundary);
  if (!body) return make_response(500, kGenericErrorBody);
  return make_response(
      200, *body, {{"Content-Type", std::string("multipart/agent; boundary=") + kResponseBoundary}});
}

void AcpServer::reset(std::uint64_t trial_salt) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    registry_.clear();
    registry_records_ = 0;
    context_ = fresh_context();
    ids_.reseed(derive_seed(seed_, trial_salt));
    if (posture_.registry_rate_limit)
      registry_bucket_ =
          std::make_unique<TokenBucket>(*posture_.registry_rate_limit, clock_->now());
    if (posture_.replay_window)
      part_nonces_ = std::make_unique<auth::NonceCache>(*posture_.replay_window);
  }
  install_default_manifest();
}

std::string AcpServer::state_digest() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string out;
  for (const auto& [name, records] : registry_) {
    for (const auto& manifest : records) {
      out += "manifest " + name + " endpoint=" + manifest.endpoint + " caps=";
      for (const auto& c : manifest.capabilities) out += c + ",";
      out += " sig=" + manifest.signature.value_or("-") + "\n";
    }
  }
  out += "itinerary bookings=";
  for (const auto& b : context_.itinerary.bookings) out += b + "|";
  out += "\n";
  for (const auto& [field, value] : context_.itinerary.fields)
    out += "itinerary field " + field + "=" + value + "\n";
  return out;
}

std::size_t AcpServer::registry_record_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return registry_records_;
}

std::optional<Manifest> AcpServer::lookup(const std::string& name) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = registry_.find(name);
  if (it == registry_.end() || it->second.empty()) return std::nullopt;
  return it->second.back();
}

AgentContext AcpServer::context_snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return context_;
}

}  // namespace agentsec::acp
