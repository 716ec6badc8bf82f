// Server-sent-events framing.
//
//   frame := [ "event: " name "\n" ] ( "data: " line "\n" )+ "\n"
//
// Multi-line payloads expand to one data line each; carriage returns are
// normalized away before encoding so decode(encode(e)) == e always holds.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agentsec::wire {

struct SseEvent {
  std::optional<std::string> event_name;
  std::string data;

  bool operator==(const SseEvent&) const = default;

  // Normalizes CRLF / CR to LF in data; throws std::invalid_argument if the
  // event name contains a newline.
  static SseEvent make(std::optional<std::string> name, std::string data);
};

class MalformedFrame : public std::runtime_error {
 public:
  explicit MalformedFrame(const std::string& what) : std::runtime_error(what) {}
};

std::string encode_sse(const SseEvent& event);
std::string encode_sse(const std::vector<SseEvent>& events);

// Incremental decoder for streaming transports: feed() bytes as they arrive,
// take_events() drains frames completed so far.
class SseDecoder {
 public:
  void feed(std::string_view bytes);
  std::vector<SseEvent> take_events();

  // True when fed bytes end on a frame boundary (nothing buffered).
  bool at_frame_boundary() const;

 private:
  void consume_line(const std::string& line);

  std::string buffer_;                // partial line
  std::optional<std::string> name_;   // current frame state
  std::vector<std::string> data_lines_;
  bool in_frame_ = false;
  std::vector<SseEvent> ready_;
};

// Whole-buffer decode; throws MalformedFrame if the input does not end on a
// frame boundary (e.g. missing blank-line terminator).
std::vector<SseEvent> decode_sse(std::string_view bytes);

}  // namespace agentsec::wire
