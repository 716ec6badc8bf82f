// Vulnerability taxonomy and scoring. Fourteen weakness classes grouped into
// five security domains, trial-outcome scoring, the Mitigated / Vulnerable /
// Partial classification rules, exposure scores and per-domain mitigation
// aggregates consumed by the matrix, summary and radar emitters.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace agentsec::taxonomy {

enum class VulnerabilityId {
  TokenLifetime,
  Sca,
  GranularScopes,
  TransparencyConsent,
  PrivilegePersistence,
  DiscoverySpoofing,
  ExcessiveExposure,
  SelfDisclosure,
  ConsentFatigue,
  ComplianceGaps,
  TamperMitm,
  ToolPoisoning,
  RegistryDos,
  SmartContract,
};

enum class SecurityDomain {
  Authentication,
  Authorization,
  Confidentiality,
  Integrity,
  Availability,
};

enum class ClassificationLabel {
  Mitigated,
  Vulnerable,
  Partial,
  NotApplicable,
  Theoretical,
};

// Canonical row order for matrices and reports (grouped by domain).
const std::vector<VulnerabilityId>& all_vulnerabilities();
const std::vector<SecurityDomain>& all_domains();

SecurityDomain domain_of(VulnerabilityId id);

// Stable identifiers used in serialized reports ("SCA", "TamperMITM", ...).
std::string to_string(VulnerabilityId id);
std::string to_string(SecurityDomain d);
std::string to_string(ClassificationLabel l);
std::optional<VulnerabilityId> vulnerability_from_string(const std::string& s);
std::optional<SecurityDomain> domain_from_string(const std::string& s);
std::optional<ClassificationLabel> label_from_string(const std::string& s);

// Human-readable row labels and optional CWE tag (display metadata only).
std::string display_name(VulnerabilityId id);
std::string display_name(SecurityDomain d);
std::optional<std::string> cwe_of(VulnerabilityId id);

// Matrix cell glyphs: Mitigated ✓, Vulnerable ✗, Partial ◑, Theoretical ◈,
// NotApplicable —.
std::string glyph(ClassificationLabel l);

// One adversarial trial against a SUT.
struct TrialOutcome {
  std::string vector_name;       // attack vector that produced this trial
  bool attack_succeeded = false;
  double impact = 0.0;           // [0,1]; 0 when fully blocked
  bool partial_effect = false;   // impact in (0,1) requires this flag
  std::optional<int> observed_status;
  std::string evidence;          // deterministic, human-readable trace
};

// Percentage of trials where the attack was blocked. Throws
// std::invalid_argument on an empty span or mixed vector names.
double defense_success(std::span<const TrialOutcome> outcomes);

// Mean impact across trials (empty span throws).
double mean_impact(std::span<const TrialOutcome> outcomes);

// Classification rules, applied in order:
//   1. an explicit override label passes through untouched;
//   2. a defense that exists only as an optional control which default
//      deployments omit is Partial regardless of the measured rate;
//   3. 100% blocked -> Mitigated;
//   4. 0% blocked -> Vulnerable;
//   5. anything in between -> Partial.
ClassificationLabel classify_vector(std::span<const TrialOutcome> outcomes,
                                    bool posture_dependent,
                                    std::optional<ClassificationLabel> override_label = std::nullopt);

// Per-vulnerability scoring record for executed vectors.
struct VulnerabilityReport {
  VulnerabilityId id = VulnerabilityId::TokenLifetime;
  ClassificationLabel label = ClassificationLabel::Theoretical;
  int trials = 0;  // 0 for rows classified without executed trials
  double defense_success_pct = 0.0;
  double mean_impact = 0.0;
  std::vector<std::string> vectors;  // contributing attack vector names
};

enum class Provenance { Empirical, Literature };

std::string to_string(Provenance p);

// A complete column of the vulnerability/status matrix: one label per
// vulnerability, all fourteen present.
struct ProtocolMatrix {
  std::string protocol;  // "CORAL", "ACP", "A2A", ...
  Provenance provenance = Provenance::Empirical;
  std::map<VulnerabilityId, ClassificationLabel> entries;

  bool complete() const { return entries.size() == all_vulnerabilities().size(); }
  std::string column_label() const;  // e.g. "CORAL (Empirical)"
};

// exposure = confirmed + 0.5 * partial
struct ExposureSummary {
  int confirmed = 0;
  int partial = 0;
  double score = 0.0;
};

ExposureSummary exposure_score(int confirmed, int partial);

// Counts Vulnerable/Partial cells of a matrix and scores them.
ExposureSummary recount_exposure(const ProtocolMatrix& m);

// Domain aggregate on the 0..3 mitigation scale: Mitigated 3.0, Partial 1.5,
// Vulnerable and Theoretical 0.0. NotApplicable entries are excluded from the
// mean; a domain that is entirely NotApplicable scores 0.0 with the flag set.
struct DomainScore {
  double value = 0.0;
  bool not_applicable = false;
};

DomainScore domain_mitigation(const ProtocolMatrix& m, SecurityDomain d);

}  // namespace agentsec::taxonomy
