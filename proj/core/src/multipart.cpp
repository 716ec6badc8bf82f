#include "agentsec/multipart.hpp"

#include <charconv>

namespace agentsec::mime {

namespace {

constexpr char kCrlf[] = "\r\n";

bool single_line(const std::string& s) {
  return s.find('\r') == std::string::npos && s.find('\n') == std::string::npos;
}

// True when some \r\n-separated line of body would be read back as a frame
// edge, making the document ambiguous.
bool body_collides(const std::string& body, const std::string& delimiter,
                   const std::string& terminator) {
  std::size_t start = 0;
  for (;;) {
    auto end = body.find("\r\n", start);
    std::string line = body.substr(start, end == std::string::npos ? std::string::npos
                                                                   : end - start);
    if (line == delimiter || line == terminator) return true;
    if (end == std::string::npos) return false;
    start = end + 2;
  }
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Pulls the next \r\n-terminated line out of text starting at pos; advances
// pos past the terminator. Returns false at end of input or on a bare line
// without terminator.
bool next_line(const std::string& text, std::size_t& pos, std::string& line) {
  auto end = text.find(kCrlf, pos);
  if (end == std::string::npos) return false;
  line = text.substr(pos, end - pos);
  pos = end + 2;
  return true;
}

}  // namespace

std::string to_string(PartRole role) {
  switch (role) {
    case PartRole::Instruction: return "instruction";
    case PartRole::Data: return "data";
    case PartRole::Artifact: return "artifact";
  }
  return "data";
}

std::optional<PartRole> role_from_string(const std::string& s) {
  if (s == "instruction") return PartRole::Instruction;
  if (s == "data") return PartRole::Data;
  if (s == "artifact") return PartRole::Artifact;
  return std::nullopt;
}

bool valid_boundary(const std::string& boundary) {
  if (boundary.empty() || boundary.size() > 64) return false;
  for (char c : boundary) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::optional<std::string> encode_multipart(const std::vector<Part>& parts,
                                            const std::string& boundary) {
  if (!valid_boundary(boundary)) return std::nullopt;
  const std::string delimiter = "--" + boundary;
  const std::string terminator = delimiter + "--";
  std::string out;
  for (const auto& part : parts) {
    if (!single_line(part.content_type) || part.content_type.empty()) return std::nullopt;
    if (part.signature && !single_line(*part.signature)) return std::nullopt;
    if (part.nonce && !single_line(*part.nonce)) return std::nullopt;
    // A body line equal to a frame edge would be re-parsed as one.
    if (body_collides(part.body, delimiter, terminator)) return std::nullopt;

    out += delimiter;
    out += kCrlf;
    out += "Content-Type: " + part.content_type;
    out += kCrlf;
    out += "X-Part-Role: " + to_string(part.role);
    out += kCrlf;
    if (part.signature) {
      out += "X-Part-Signature: " + *part.signature;
      out += kCrlf;
    }
    if (part.timestamp_ms) {
      out += "X-Part-Timestamp: " + std::to_string(*part.timestamp_ms);
      out += kCrlf;
    }
    if (part.nonce) {
      out += "X-Part-Nonce: " + *part.nonce;
      out += kCrlf;
    }
    out += kCrlf;
    out += part.body;
    out += kCrlf;
  }
  out += terminator;
  out += kCrlf;
  return out;
}

std::optional<std::vector<Part>> parse_multipart(const std::string& text,
                                                 const std::string& boundary) {
  if (!valid_boundary(boundary)) return std::nullopt;
  const std::string delimiter = "--" + boundary;
  const std::string terminator = delimiter + "--";

  std::vector<Part> parts;
  std::size_t pos = 0;
  std::string line;
  if (!next_line(text, pos, line)) return std::nullopt;

  while (line != terminator) {
    if (line != delimiter) return std::nullopt;

    Part part;
    bool have_type = false, have_role = false;
    bool have_sig = false, have_ts = false, have_nonce = false;
    for (;;) {
      if (!next_line(text, pos, line)) return std::nullopt;
      if (line.empty()) break;  // header/body separator
      auto colon = line.find(": ");
      if (colon == std::string::npos) return std::nullopt;
      std::string name = line.substr(0, colon);
      std::string value = line.substr(colon + 2);
      if (name == "Content-Type") {
        if (have_type || value.empty()) return std::nullopt;
        part.content_type = value;
        have_type = true;
      } else if (name == "X-Part-Role") {
        if (have_role) return std::nullopt;
        auto role = role_from_string(value);
        if (!role) return std::nullopt;
        part.role = *role;
        have_role = true;
      } else if (name == "X-Part-Signature") {
        if (have_sig) return std::nullopt;
        part.signature = value;
        have_sig = true;
      } else if (name == "X-Part-Timestamp") {
        if (have_ts) return std::nullopt;
        auto value_int = parse_int(value);
        if (!value_int) return std::nullopt;
        part.timestamp_ms = *value_int;
        have_ts = true;
      } else if (name == "X-Part-Nonce") {
        if (have_nonce) return std::nullopt;
        part.nonce = value;
        have_nonce = true;
      } else {
        return std::nullopt;  // unknown header: strict grammar
      }
    }
    if (!have_type || !have_role) return std::nullopt;

    // Body runs until the next line that is a delimiter or terminator.
    std::string body;
    bool first_body_line = true;
    for (;;) {
      if (!next_line(text, pos, line)) return std::nullopt;
      if (line == delimiter || line == terminator) break;
      if (!first_body_line) body += "\r\n";
      body += line;
      first_body_line = false;
    }
    part.body = std::move(body);
    parts.push_back(std::move(part));
  }

  if (pos != text.size()) return std::nullopt;  // trailing bytes
  return parts;
}

std::optional<std::string> parse_boundary(const std::string& content_type) {
  const std::string marker = "boundary=";
  auto at = content_type.find(marker);
  if (at == std::string::npos) return std::nullopt;
  std::string boundary = content_type.substr(at + marker.size());
  auto semi = boundary.find(';');
  if (semi != std::string::npos) boundary = boundary.substr(0, semi);
  if (!valid_boundary(boundary)) return std::nullopt;
  return boundary;
}

std::string part_canonical_bytes(const Part& part) {
  std::string out = "part.v1\n";
  out += part.content_type + "\n";
  out += to_string(part.role) + "\n";
  out += (part.timestamp_ms ? std::to_string(*part.timestamp_ms) : "-") + "\n";
  out += (part.nonce ? *part.nonce : "-") + "\n";
  out += part.body;
  return out;
}

}  // namespace agentsec::mime
