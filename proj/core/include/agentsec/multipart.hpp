// Boundary-delimited multipart bodies with per-part headers. This is the
// task/response wire format of the ACP-style SUT; the exact grammar is
// frozen in fixtures/FORMATS.md and the strict parser below rejects any
// deviation.
//
// Frame:
//   --<boundary>\r\n
//   Content-Type: <type>\r\n
//   X-Part-Role: instruction|data|artifact\r\n
//   X-Part-Signature: <key_id>:<hex>\r\n     (optional)
//   X-Part-Timestamp: <ms>\r\n               (optional)
//   X-Part-Nonce: <nonce>\r\n                (optional)
//   \r\n
//   <body bytes>\r\n
//   ... further parts ...
//   --<boundary>--\r\n
//
// A document with zero parts is the bare terminator line.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace agentsec::mime {

enum class PartRole { Instruction, Data, Artifact };

std::string to_string(PartRole role);
std::optional<PartRole> role_from_string(const std::string& s);

struct Part {
  std::string content_type = "text/plain";
  PartRole role = PartRole::Data;
  std::string body;
  // Detached signature "<key_id>:<hex>" over part_canonical_bytes().
  std::optional<std::string> signature;
  // Strict-envelope freshness fields; covered by the signature when present.
  std::optional<std::int64_t> timestamp_ms;
  std::optional<std::string> nonce;

  bool operator==(const Part&) const = default;
};

// Boundary charset: [A-Za-z0-9_-]{1,64}.
bool valid_boundary(const std::string& boundary);

// Serializes parts. Returns nullopt when the boundary is invalid, a body
// contains the delimiter sequence, or a header value contains CR/LF.
std::optional<std::string> encode_multipart(const std::vector<Part>& parts,
                                            const std::string& boundary);

// Strict parser; nullopt on any grammar violation (unknown or duplicate
// header, missing terminator, bad role, non-integer timestamp, ...).
std::optional<std::vector<Part>> parse_multipart(const std::string& text,
                                                 const std::string& boundary);

// Extracts boundary=... from a Content-Type header value such as
// "multipart/agent; boundary=b1".
std::optional<std::string> parse_boundary(const std::string& content_type);

// Bytes covered by a part signature: everything except the signature itself.
std::string part_canonical_bytes(const Part& part);

}  // namespace agentsec::mime
