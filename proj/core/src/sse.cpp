#include "agentsec/sse.hpp"

namespace agentsec::wire {

namespace {

std::string normalize_newlines(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
    } else {
      out.push_back(raw[i]);
    }
  }
  return out;
}

std::vector<std::string> split_lines(const std::string& data) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (true) {
    size_t nl = data.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(data.substr(start));
      break;
    }
    lines.push_back(data.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

}  // namespace

SseEvent SseEvent::make(std::optional<std::string> name, std::string data) {
  if (name && name->find('\n') != std::string::npos)
    throw std::invalid_argument("event name must be a single line");
  if (name && name->find('\r') != std::string::npos)
    throw std::invalid_argument("event name must be a single line");
  SseEvent e;
  e.event_name = std::move(name);
  e.data = normalize_newlines(data);
  return e;
}

std::string encode_sse(const SseEvent& event) {
  std::string out;
  if (event.event_name) {
    out += "event: ";
    out += *event.event_name;
    out.push_back('\n');
  }
  for (const auto& line : split_lines(event.data)) {
    out += "data: ";
    out += line;
    out.push_back('\n');
  }
  out.push_back('\n');
  return out;
}

std::string encode_sse(const std::vector<SseEvent>& events) {
  std::string out;
  for (const auto& e : events) out += encode_sse(e);
  return out;
}

void SseDecoder::feed(std::string_view bytes) {
  for (char c : bytes) {
    if (c != '\n') {
      buffer_.push_back(c);
      continue;
    }
    consume_line(buffer_);
    buffer_.clear();
  }
}

void SseDecoder::consume_line(const std::string& line) {
  if (line.empty()) {
    if (!in_frame_) return;  // stray blank line between frames
    SseEvent e;
    e.event_name = name_;
    std::string data;
    for (size_t i = 0; i < data_lines_.size(); ++i) {
      if (i) data.push_back('\n');
      data += data_lines_[i];
    }
    e.data = std::move(data);
    ready_.push_back(std::move(e));
    name_.reset();
    data_lines_.clear();
    in_frame_ = false;
    return;
  }
  if (line.rfind("event: ", 0) == 0) {
    name_ = line.substr(7);
    in_frame_ = true;
  } else if (line.rfind("data: ", 0) == 0) {
    data_lines_.push_back(line.substr(6));
    in_frame_ = true;
  }
  // Unknown field lines are ignored, per the usual lenient-reader convention.
}

std::vector<SseEvent> SseDecoder::take_events() {
  std::vector<SseEvent> out;
  out.swap(ready_);
  return out;
}

bool SseDecoder::at_frame_boundary() const { return buffer_.empty() && !in_frame_; }

std::vector<SseEvent> decode_sse(std::string_view bytes) {
  SseDecoder d;
  d.feed(bytes);
  if (!d.at_frame_boundary())
    throw MalformedFrame("stream ended mid-frame (missing blank-line terminator)");
  return d.take_events();
}

}  // namespace agentsec::wire
