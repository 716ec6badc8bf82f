#include "agentsec/authsig.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <stdexcept>

#include "agentsec/ids.hpp"

namespace agentsec::auth {

namespace {

std::string to_hex(const unsigned char* bytes, size_t n) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) {
    out.push_back(hex[bytes[i] >> 4]);
    out.push_back(hex[bytes[i] & 0xF]);
  }
  return out;
}

std::string canonical_input(const SigningKey& key, std::string_view bytes) {
  std::string input;
  input.reserve(4 + key.key_id.size() + bytes.size());
  std::uint32_t len = static_cast<std::uint32_t>(key.key_id.size());
  input.push_back(static_cast<char>((len >> 24) & 0xFF));
  input.push_back(static_cast<char>((len >> 16) & 0xFF));
  input.push_back(static_cast<char>((len >> 8) & 0xFF));
  input.push_back(static_cast<char>(len & 0xFF));
  input += key.key_id;
  input.append(bytes.data(), bytes.size());
  return input;
}

void require_field(const std::string& value, const char* what) {
  if (value.find('|') != std::string::npos || value.find('\n') != std::string::npos ||
      value.find(',') != std::string::npos)
    throw std::invalid_argument(std::string(what) + " must not contain '|', ',' or newlines");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

}  // namespace

SigningKey make_key(const std::string& key_id, std::uint64_t seed) {
  std::uint64_t state = seed;
  for (char c : key_id) state = state * 31 + static_cast<unsigned char>(c);
  SigningKey key;
  key.key_id = key_id;
  key.secret.reserve(32);
  for (int word = 0; word < 4; ++word) {
    std::uint64_t v = splitmix64(state);
    for (int b = 7; b >= 0; --b) key.secret.push_back(static_cast<char>((v >> (b * 8)) & 0xFF));
  }
  return key;
}

std::string sign(const SigningKey& key, std::string_view bytes) {
  std::string input = canonical_input(key, bytes);
  unsigned char mac[EVP_MAX_MD_SIZE];
  size_t mac_len = 0;
  if (!EVP_Q_mac(nullptr, "HMAC", nullptr, "SHA256", nullptr, key.secret.data(),
                 key.secret.size(), reinterpret_cast<const unsigned char*>(input.data()),
                 input.size(), mac, sizeof mac, &mac_len))
    throw std::runtime_error("HMAC computation failed");
  return to_hex(mac, mac_len);
}

bool verify(const SigningKey& key, std::string_view bytes, std::string_view signature_hex) {
  std::string expected = sign(key, bytes);
  if (expected.size() != signature_hex.size()) return false;
  // Constant-time compare; the lab's adversaries don't time us, but habits.
  unsigned char diff = 0;
  for (size_t i = 0; i < expected.size(); ++i)
    diff |= static_cast<unsigned char>(expected[i]) ^ static_cast<unsigned char>(signature_hex[i]);
  return diff == 0;
}

std::string token_canonical_bytes(const BearerToken& token) {
  std::string scopes;
  for (size_t i = 0; i < token.scopes.size(); ++i) {
    if (i) scopes.push_back(',');
    scopes += token.scopes[i];
  }
  std::string out = "tok.v1\n";
  out += token.subject;
  out.push_back('\n');
  out += scopes;
  out.push_back('\n');
  out += std::to_string(token.issued_at.count());
  out.push_back('\n');
  out += token.expires_at ? std::to_string(token.expires_at->count()) : std::string("-");
  out.push_back('\n');
  out += token.nonce;
  return out;
}

BearerToken issue_token(const SigningKey& key, const std::string& subject,
                        const std::vector<std::string>& scopes, const Clock& clock,
                        std::optional<Duration> ttl, const std::string& nonce) {
  require_field(subject, "token subject");
  require_field(nonce, "token nonce");
  for (const auto& s : scopes) {
    if (s.find('|') != std::string::npos || s.find('\n') != std::string::npos ||
        s.find(',') != std::string::npos)
      throw std::invalid_argument("token scope must not contain '|', ',' or newlines");
  }
  BearerToken token;
  token.subject = subject;
  token.scopes = scopes;
  token.issued_at = clock.now();
  if (ttl) token.expires_at = token.issued_at + *ttl;
  token.nonce = nonce;
  token.signature = sign(key, token_canonical_bytes(token));
  return token;
}

std::string token_wire(const BearerToken& token) {
  std::string scopes;
  for (size_t i = 0; i < token.scopes.size(); ++i) {
    if (i) scopes.push_back(',');
    scopes += token.scopes[i];
  }
  std::string out = token.subject;
  out.push_back('|');
  out += scopes;
  out.push_back('|');
  out += std::to_string(token.issued_at.count());
  out.push_back('|');
  out += token.expires_at ? std::to_string(token.expires_at->count()) : std::string("-");
  out.push_back('|');
  out += token.nonce;
  out.push_back('|');
  out += token.signature;
  return out;
}

std::optional<BearerToken> parse_token_wire(const std::string& wire) {
  if (wire.find('\n') != std::string::npos) return std::nullopt;
  std::vector<std::string> parts = split(wire, '|');
  if (parts.size() != 6) return std::nullopt;
  BearerToken token;
  token.subject = parts[0];
  if (!parts[1].empty()) token.scopes = split(parts[1], ',');
  auto issued = parse_int(parts[2]);
  if (!issued) return std::nullopt;
  token.issued_at = Instant{*issued};
  if (parts[3] != "-") {
    auto expires = parse_int(parts[3]);
    if (!expires) return std::nullopt;
    token.expires_at = Instant{*expires};
  }
  token.nonce = parts[4];
  token.signature = parts[5];
  return token;
}

std::string to_string(TokenCheck c) {
  switch (c) {
    case TokenCheck::Ok: return "Ok";
    case TokenCheck::BadSignature: return "BadSignature";
    case TokenCheck::Expired: return "Expired";
    case TokenCheck::ScopeDenied: return "ScopeDenied";
  }
  return "?";
}

TokenCheck validate_token(const SigningKey& key, const BearerToken& token, const Clock& clock,
                          const std::optional<std::string>& required_scope) {
  if (!verify(key, token_canonical_bytes(token), token.signature))
    return TokenCheck::BadSignature;
  if (token.expires_at && clock.now() >= *token.expires_at) return TokenCheck::Expired;
  if (required_scope) {
    bool found = false;
    for (const auto& s : token.scopes)
      if (s == *required_scope) found = true;
    if (!found) return TokenCheck::ScopeDenied;
  }
  return TokenCheck::Ok;
}

TokenCheck validate_token_wire(const SigningKey& key, const std::string& wire, const Clock& clock,
                               const std::optional<std::string>& required_scope) {
  auto token = parse_token_wire(wire);
  if (!token) return TokenCheck::BadSignature;
  return validate_token(key, *token, clock, required_scope);
}

NonceCache::NonceCache(Duration window) : window_(window) {
  if (window.count() <= 0) throw std::invalid_argument("nonce window must be positive");
}

bool NonceCache::check_and_record(const std::string& nonce, Instant now) {
  std::lock_guard<std::mutex> lock(mu_);
  prune(now);
  auto it = first_seen_.find(nonce);
  if (it != first_seen_.end()) return false;
  first_seen_[nonce] = now;
  order_.emplace_back(now, nonce);
  return true;
}

std::size_t NonceCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return first_seen_.size();
}

void NonceCache::prune(Instant now) {
  while (!order_.empty() && order_.front().first + window_ <= now) {
    auto& [seen, nonce] = order_.front();
    auto it = first_seen_.find(nonce);
    // Only drop the map entry if it still refers to this recording; the nonce
    // may have been re-accepted (and re-recorded) after an earlier expiry.
    if (it != first_seen_.end() && it->second == seen) first_seen_.erase(it);
    order_.pop_front();
  }
}

}  // namespace agentsec::auth
