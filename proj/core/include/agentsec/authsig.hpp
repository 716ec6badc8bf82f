// Tokens, detached part signatures, and replay memory.
//
// The signature scheme is deliberately pluggable-but-simple: a keyed MAC
// (HMAC-SHA256) over canonical bytes, where the canonical input is the exact
// wire bytes of the signed object length-prefixed with the key id. There is
// no interoperability with real JOSE/JWT stacks and none is intended — the
// lab studies validation *placement*, not crypto strength.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentsec/clock.hpp"

namespace agentsec::auth {

struct SigningKey {
  std::string key_id;
  std::string secret;  // raw bytes
};

// Deterministically derives a key from (key_id, seed); 32-byte secret.
SigningKey make_key(const std::string& key_id, std::uint64_t seed);

// Lowercase-hex HMAC-SHA256 over u32be(len(key_id)) || key_id || bytes.
std::string sign(const SigningKey& key, std::string_view bytes);

// Constant-behavior verify: recompute and compare. Any single-byte change in
// bytes, signature or key id flips this to false.
bool verify(const SigningKey& key, std::string_view bytes, std::string_view signature_hex);

// ---------------------------------------------------------------------------

struct BearerToken {
  std::string subject;
  std::vector<std::string> scopes;
  Instant issued_at{};
  std::optional<Instant> expires_at;  // absent = never expires
  std::string nonce;
  std::string signature;

  bool operator==(const BearerToken&) const = default;
};

// Canonical signed bytes of a token (excludes the signature itself).
std::string token_canonical_bytes(const BearerToken& token);

// Mints a signed token. ttl absent means no expiry; ttl present sets
// expires_at = issued_at + ttl (a zero ttl is already expired at issuance).
// Field values must be single-line and '|'-free; violations throw.
BearerToken issue_token(const SigningKey& key, const std::string& subject,
                        const std::vector<std::string>& scopes, const Clock& clock,
                        std::optional<Duration> ttl, const std::string& nonce);

// Wire form: subject|scope1,scope2|issued_ms|expires_ms-or-'-'|nonce|sig_hex
std::string token_wire(const BearerToken& token);
std::optional<BearerToken> parse_token_wire(const std::string& wire);

enum class TokenCheck { Ok, BadSignature, Expired, ScopeDenied };

std::string to_string(TokenCheck c);

// Checks, in order: signature, expiry (now >= expires_at is expired), then
// required scope membership (skipped when no scope is required).
TokenCheck validate_token(const SigningKey& key, const BearerToken& token, const Clock& clock,
                          const std::optional<std::string>& required_scope);

// Parses and validates wire bytes; unparsable input counts as BadSignature
// (a forged token and a mangled one are indistinguishable on purpose).
TokenCheck validate_token_wire(const SigningKey& key, const std::string& wire, const Clock& clock,
                               const std::optional<std::string>& required_scope);

// ---------------------------------------------------------------------------

// Window-bounded replay memory. A nonce is rejected iff it was recorded less
// than `window` ago; after the window elapses the same nonce is accepted (and
// re-recorded). Thread-safe; linearizable under concurrent checks.
class NonceCache {
 public:
  explicit NonceCache(Duration window);

  // True = fresh (recorded now); false = replay within the window.
  bool check_and_record(const std::string& nonce, Instant now);

  std::size_t size() const;  // live entries (post-pruning bound)

 private:
  void prune(Instant now);

  const Duration window_;
  mutable std::mutex mu_;
  std::map<std::string, Instant> first_seen_;
  std::deque<std::pair<Instant, std::string>> order_;
};

}  // namespace agentsec::auth
