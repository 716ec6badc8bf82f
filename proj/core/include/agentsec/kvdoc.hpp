// Line-oriented key/value document format used for request and response
// bodies throughout the lab. Grammar (see fixtures/FORMATS.md):
//
//   doc   := line*
//   line  := key '=' value '\n'
//   key   := [A-Za-z0-9_.-]+
//   value := percent-escaped text ('\n' -> %0A, '%' -> %25, '=' -> %3D)
//
// Later lines win on duplicate keys. List-valued fields join items with ','.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace agentsec::kv {

class Doc {
 public:
  Doc() = default;

  void set(const std::string& key, const std::string& value);
  void set_list(const std::string& key, const std::vector<std::string>& items);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  // Missing key yields an empty list; empty value yields an empty list.
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::string encode() const;

  // Returns nullopt on any malformed line (bad key charset, missing '=',
  // invalid escape). Parsing is strict: garbage in, nothing out.
  static std::optional<Doc> parse(const std::string& text);

 private:
  std::map<std::string, std::string> entries_;
};

std::string escape_value(const std::string& raw);
std::optional<std::string> unescape_value(const std::string& escaped);

}  // namespace agentsec::kv
