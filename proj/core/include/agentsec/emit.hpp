// Report emitters: the comparative vulnerability-status matrix (Markdown +
// CSV, glyph cells), per-domain radar data (CSV + standalone SVG), and the
// compact per-protocol summary with optional published-count comparison.
// All output is deterministic text.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "agentsec/taxonomy.hpp"

namespace agentsec::bench {

struct MatrixDocument {
  std::string markdown;
  std::string csv;  // header: vulnerability,domain,<column label...>
};

// One column per input matrix, rows in canonical domain-grouped order,
// cells rendered as glyphs. Throws std::invalid_argument when `columns` is
// empty or any input is incomplete.
MatrixDocument emit_vsm(const std::vector<taxonomy::ProtocolMatrix>& columns);

// Five rows on the 0..3 mitigation scale. Header: domain,value,na.
// Not-applicable domains carry value 0 and na=true (plotting convenience,
// not exposure). Throws std::invalid_argument on an incomplete matrix.
std::string emit_radar_csv(const taxonomy::ProtocolMatrix& matrix);

// Standalone SVG 1.1 pentagon radar, one polygon per input matrix.
// Throws std::invalid_argument when empty or any input is incomplete.
std::string emit_radar_svg(const std::vector<taxonomy::ProtocolMatrix>& columns);

struct PaperCounts {
  int confirmed = 0;
  int partial = 0;
};

// Parses a published-counts fixture: {"PROTOCOL": {"confirmed": n,
// "partial": n}, ...}. Throws std::runtime_error on malformed input.
std::map<std::string, PaperCounts> load_paper_counts(const std::string& json_text);

// Markdown table of (protocol, confirmed, partial, exposure score), one row
// per matrix in input order; empty input yields the header alone. When
// `published` is non-empty, appends the published counts and a mismatch
// flag per row. Recounts are emitted as computed, never auto-corrected.
std::string emit_summary(const std::vector<taxonomy::ProtocolMatrix>& matrices,
                         const std::map<std::string, PaperCounts>& published = {});

}  // namespace agentsec::bench
