// Experiment orchestration: runs a configured vector suite against one SUT
// posture, merges fixture overrides for vulnerabilities without executable
// vectors, classifies every row, scores exposure, and aggregates the five
// security domains. Reports serialize to canonical JSON (sorted keys, no
// wall-clock data) so identical configs yield byte-identical bytes.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentsec/attacks.hpp"
#include "agentsec/taxonomy.hpp"
#include "agentsec/wire.hpp"

namespace agentsec::bench {

// Inverse of wire::to_string(Backend): "in-process" / "loopback".
std::optional<wire::Backend> backend_from_string(const std::string& s);

// Posture presets by name. Coral: "as-published", "hardened".
// Acp: "none", "partial", "strict".
bool valid_posture(attacks::Sut sut, const std::string& name);
coral::CoralPosture coral_posture(const std::string& name);  // throws on bad name
acp::AcpPosture acp_posture(const std::string& name);        // throws on bad name

struct ExperimentConfig {
  attacks::Sut sut = attacks::Sut::Coral;
  std::string posture = "as-published";
  std::string protocol_name = "CORAL";  // matrix column identity
  std::vector<attacks::AttackVectorId> vectors;
  int trials = 50;
  std::uint64_t seed = 42;
  int flood_count = 20;
  wire::Backend backend = wire::Backend::InProcess;
  std::int64_t clock_origin_ms = 0;  // synthetic clock start, echoed in meta
  // Labels for vulnerabilities with no executable vector in this run
  // (theoretical rows, literature-style judgments). An override for a
  // vulnerability that an executed vector classifies is a config error.
  std::map<taxonomy::VulnerabilityId, taxonomy::ClassificationLabel> overrides;
  // Vulnerabilities whose defense exists only as an optional control that
  // default deployments omit: classified Partial regardless of rate.
  std::set<taxonomy::VulnerabilityId> posture_dependent;
};

// The published default suites: full vector set, trials=50, seed=42,
// flood_count=20, in-process backend, and the fixture overrides that supply
// every non-executable row's label. Throws std::invalid_argument on an
// unknown posture name.
ExperimentConfig default_config(attacks::Sut sut, const std::string& posture);

struct ExperimentReport {
  ExperimentConfig config;
  // Exactly one row per VulnerabilityId, in canonical (domain-grouped) order.
  std::vector<taxonomy::VulnerabilityReport> vulnerabilities;
  taxonomy::ProtocolMatrix matrix;
  taxonomy::ExposureSummary exposure;
  std::map<taxonomy::SecurityDomain, taxonomy::DomainScore> domains;
};

// Runs the configured suite. Throws std::invalid_argument on config errors
// (unknown posture, inapplicable vector, override colliding with an executed
// vector, or a vulnerability left with neither vector nor override);
// propagates SUT errors.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Canonical JSON: sorted keys, fixed number formatting, UTF-8. Top-level
// keys: config, domains, exposure, matrix, meta, vulnerabilities.
std::string serialize_report(const ExperimentReport& report);

struct ReportParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inverse of serialize_report. Throws ReportParseError on malformed input.
// serialize_report(parse_report(s)) == s for any s it produced.
ExperimentReport parse_report(const std::string& json_text);

// A protocol column sourced from published literature rather than runs.
struct LiteratureProfile {
  std::string protocol_name;
  std::map<taxonomy::VulnerabilityId, taxonomy::ClassificationLabel> entries;
  std::string citation;
};

struct IncompleteProfile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses a profile document: {"protocol": ..., "citation": ...,
// "entries": {vulnerability: label, ...}}. Throws IncompleteProfile naming
// the missing ids when entries do not cover all fourteen; ReportParseError
// on malformed JSON, unknown keys, or unknown names.
LiteratureProfile load_profile(const std::string& json_text);

taxonomy::ProtocolMatrix to_matrix(const LiteratureProfile& profile);

}  // namespace agentsec::bench
