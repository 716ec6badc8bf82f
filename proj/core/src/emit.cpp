#include "agentsec/emit.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace agentsec::bench {

namespace {

using taxonomy::ProtocolMatrix;
using taxonomy::SecurityDomain;
using taxonomy::VulnerabilityId;

void require_complete(const std::vector<ProtocolMatrix>& columns) {
  if (columns.empty()) throw std::invalid_argument("no matrices given");
  for (const auto& m : columns)
    if (!m.complete())
      throw std::invalid_argument("incomplete matrix for protocol: " + m.protocol);
}

// Exposure scores are multiples of 0.5: one decimal is exact.
std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

// Domain means live on a 0.375 grid (multiples of 1.5 divided by 1..4):
// four decimals are exact; trailing zeros are trimmed.
std::string format_domain(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  std::string s = buf;
  while (s.find('.') != std::string::npos && (s.back() == '0' || s.back() == '.')) {
    bool dot = s.back() == '.';
    s.pop_back();
    if (dot) break;
  }
  return s;
}

std::string format_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

MatrixDocument emit_vsm(const std::vector<ProtocolMatrix>& columns) {
  require_complete(columns);

  MatrixDocument doc;
  doc.csv = "vulnerability,domain";
  doc.markdown = "| Vulnerability | Domain |";
  std::string separator = "| --- | --- |";
  for (const auto& m : columns) {
    doc.csv += "," + m.column_label();
    doc.markdown += " " + m.column_label() + " |";
    separator += " --- |";
  }
  doc.csv += "\n";
  doc.markdown += "\n" + separator + "\n";

  for (auto id : taxonomy::all_vulnerabilities()) {
    auto domain = taxonomy::domain_of(id);
    doc.csv += taxonomy::to_string(id) + "," + taxonomy::to_string(domain);
    doc.markdown +=
        "| " + taxonomy::display_name(id) + " | " + taxonomy::display_name(domain) + " |";
    for (const auto& m : columns) {
      auto glyph = taxonomy::glyph(m.entries.at(id));
      doc.csv += "," + glyph;
      doc.markdown += " " + glyph + " |";
    }
    doc.csv += "\n";
    doc.markdown += "\n";
  }
  return doc;
}

std::string emit_radar_csv(const ProtocolMatrix& matrix) {
  require_complete({matrix});
  std::string out = "domain,value,na\n";
  for (auto d : taxonomy::all_domains()) {
    auto score = taxonomy::domain_mitigation(matrix, d);
    out += taxonomy::to_string(d) + "," + format_domain(score.value) + "," +
           (score.not_applicable ? "true" : "false") + "\n";
  }
  return out;
}

std::string emit_radar_svg(const std::vector<ProtocolMatrix>& columns) {
  require_complete(columns);
  const double cx = 260.0, cy = 270.0, radius = 190.0;
  const double pi = 3.14159265358979323846;
  const auto& domains = taxonomy::all_domains();
  auto point = [&](std::size_t axis, double fraction) {
    double angle = -pi / 2.0 + 2.0 * pi * static_cast<double>(axis) /
                                   static_cast<double>(domains.size());
    return std::pair<double, double>{cx + radius * fraction * std::cos(angle),
                                     cy + radius * fraction * std::sin(angle)};
  };
  const std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                            "#ff7f0e"};

  std::string svg =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"520\" "
      "height=\"600\" viewBox=\"0 0 520 600\">\n"
      "  <rect width=\"520\" height=\"600\" fill=\"white\"/>\n";

  // Grid rings at mitigation levels 1, 2, 3 and one spoke per domain.
  for (int ring = 1; ring <= 3; ++ring) {
    svg += "  <polygon fill=\"none\" stroke=\"#cccccc\" points=\"";
    for (std::size_t axis = 0; axis < domains.size(); ++axis) {
      auto [x, y] = point(axis, ring / 3.0);
      svg += format_px(x) + "," + format_px(y) + " ";
    }
    svg.pop_back();
    svg += "\"/>\n";
  }
  for (std::size_t axis = 0; axis < domains.size(); ++axis) {
    auto [x, y] = point(axis, 1.0);
    svg += "  <line x1=\"" + format_px(cx) + "\" y1=\"" + format_px(cy) + "\" x2=\"" +
           format_px(x) + "\" y2=\"" + format_px(y) + "\" stroke=\"#cccccc\"/>\n";
    auto [lx, ly] = point(axis, 1.13);
    svg += "  <text x=\"" + format_px(lx) + "\" y=\"" + format_px(ly) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
           taxonomy::to_string(domains[axis]) + "</text>\n";
  }

  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& color = palette[i % palette.size()];
    svg += "  <polygon fill=\"" + color + "\" fill-opacity=\"0.18\" stroke=\"" + color +
           "\" stroke-width=\"2\" points=\"";
    for (std::size_t axis = 0; axis < domains.size(); ++axis) {
      auto score = taxonomy::domain_mitigation(columns[i], domains[axis]);
      auto [x, y] = point(axis, score.value / 3.0);
      svg += format_px(x) + "," + format_px(y) + " ";
    }
    svg.pop_back();
    svg += "\"/>\n";
    // Legend row.
    double ly = 540.0 + 20.0 * static_cast<double>(i);
    svg += "  <rect x=\"30\" y=\"" + format_px(ly - 10.0) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    svg += "  <text x=\"50\" y=\"" + format_px(ly) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + columns[i].column_label() +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::map<std::string, PaperCounts> load_paper_counts(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("paper counts must be an object");
  std::map<std::string, PaperCounts> counts;
  for (const auto& [protocol, value] : doc.items()) {
    if (!value.is_object() || !value.contains("confirmed") || !value.contains("partial") ||
        value.size() != 2)
      throw std::runtime_error("bad counts for protocol: " + protocol);
    PaperCounts c;
    try {
      c.confirmed = value.at("confirmed").get<int>();
      c.partial = value.at("partial").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(std::string("bad counts: ") + e.what());
    }
    counts[protocol] = c;
  }
  return counts;
}

std::string emit_summary(const std::vector<ProtocolMatrix>& matrices,
                         const std::map<std::string, PaperCounts>& published) {
  for (const auto& m : matrices)
    if (!m.complete())
      throw std::invalid_argument("incomplete matrix for protocol: " + m.protocol);

  bool with_published = !published.empty();
  std::string out = "| Protocol | Confirmed | Partial | Exposure Score |";
  std::string separator = "| --- | --- | --- | --- |";
  if (with_published) {
    out += " Published Confirmed | Published Partial | Published Score | Mismatch |";
    separator += " --- | --- | --- | --- |";
  }
  out += "\n" + separator + "\n";

  for (const auto& m : matrices) {
    auto exposure = taxonomy::recount_exposure(m);
    out += "| " + m.protocol + " | " + std::to_string(exposure.confirmed) + " | " +
           std::to_string(exposure.partial) + " | " + format_score(exposure.score) + " |";
    if (with_published) {
      auto it = published.find(m.protocol);
      if (it == published.end()) {
        out += " - | - | - | - |";
      } else {
        auto paper = taxonomy::exposure_score(it->second.confirmed, it->second.partial);
        bool mismatch = paper.confirmed != exposure.confirmed ||
                        paper.partial != exposure.partial || paper.score != exposure.score;
        out += " " + std::to_string(paper.confirmed) + " | " + std::to_string(paper.partial) +
               " | " + format_score(paper.score) + " | " + (mismatch ? "yes" : "no") + " |";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace agentsec::bench
