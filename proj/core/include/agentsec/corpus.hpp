// Frozen corpus of adversarial and benign instruction payloads. Attack
// vectors draw from a seeded permutation of this list instead of generating
// text at run time, which keeps every trial reproducible.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agentsec::attacks {

enum class PayloadKind { Exfil, Tamper, Benign };

std::string to_string(PayloadKind kind);

struct CorpusEntry {
  std::string name;  // stable slug, e.g. "exfil-passport"
  PayloadKind kind = PayloadKind::Benign;
  std::string text;  // instruction body (may be multi-line, '\n'-separated)

  bool operator==(const CorpusEntry&) const = default;
};

// The frozen list in its canonical order (≥ 20 entries).
const std::vector<CorpusEntry>& corpus_entries();

// Seeded Fisher–Yates permutation of the frozen list; identical seeds yield
// identical orderings.
std::vector<CorpusEntry> corpus(std::uint64_t seed);

// The permutation restricted to one kind (ordering inherited from corpus()).
std::vector<CorpusEntry> corpus_of_kind(std::uint64_t seed, PayloadKind kind);

}  // namespace agentsec::attacks
