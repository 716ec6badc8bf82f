#include "agentsec/kvdoc.hpp"

#include <cctype>

namespace agentsec::kv {

namespace {

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  }
  return true;
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string escape_value(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\n': out += "%0A"; break;
      case '%': out += "%25"; break;
      case '=': out += "%3D"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::optional<std::string> unescape_value(const std::string& escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c == '\n' || c == '=') return std::nullopt;  // must have been escaped
    if (c != '%') {
      out.push_back(c);
      continue;
    }
    if (i + 2 >= escaped.size()) return std::nullopt;
    int hi = hex_nibble(escaped[i + 1]);
    int lo = hex_nibble(escaped[i + 2]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>(hi * 16 + lo));
    i += 2;
  }
  return out;
}

void Doc::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void Doc::set_list(const std::string& key, const std::vector<std::string>& items) {
  std::string joined;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) joined.push_back(',');
    joined += items[i];
  }
  entries_[key] = joined;
}

bool Doc::has(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> Doc::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Doc::get_list(const std::string& key) const {
  std::vector<std::string> items;
  auto v = get(key);
  if (!v || v->empty()) return items;
  size_t start = 0;
  while (true) {
    size_t comma = v->find(',', start);
    if (comma == std::string::npos) {
      items.push_back(v->substr(start));
      break;
    }
    items.push_back(v->substr(start, comma - start));
    start = comma + 1;
  }
  return items;
}

std::string Doc::encode() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out.push_back('=');
    out += escape_value(value);
    out.push_back('\n');
  }
  return out;
}

std::optional<Doc> Doc::parse(const std::string& text) {
  Doc doc;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) return std::nullopt;  // unterminated line
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) return std::nullopt;
    size_t eq = line.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string key = line.substr(0, eq);
    if (!valid_key(key)) return std::nullopt;
    auto value = unescape_value(line.substr(eq + 1));
    if (!value) return std::nullopt;
    doc.entries_[key] = *value;
  }
  return doc;
}

}  // namespace agentsec::kv
