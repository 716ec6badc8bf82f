#include "agentsec/taxonomy.hpp"

#include <stdexcept>

namespace agentsec::taxonomy {

const std::vector<VulnerabilityId>& all_vulnerabilities() {
  static const std::vector<VulnerabilityId> order = {
      VulnerabilityId::TokenLifetime,
      VulnerabilityId::Sca,
      VulnerabilityId::GranularScopes,
      VulnerabilityId::TransparencyConsent,
      VulnerabilityId::PrivilegePersistence,
      VulnerabilityId::DiscoverySpoofing,
      VulnerabilityId::ExcessiveExposure,
      VulnerabilityId::SelfDisclosure,
      VulnerabilityId::ConsentFatigue,
      VulnerabilityId::ComplianceGaps,
      VulnerabilityId::TamperMitm,
      VulnerabilityId::ToolPoisoning,
      VulnerabilityId::RegistryDos,
      VulnerabilityId::SmartContract,
  };
  return order;
}

const std::vector<SecurityDomain>& all_domains() {
  static const std::vector<SecurityDomain> order = {
      SecurityDomain::Authentication, SecurityDomain::Authorization,
      SecurityDomain::Confidentiality, SecurityDomain::Integrity,
      SecurityDomain::Availability,
  };
  return order;
}

SecurityDomain domain_of(VulnerabilityId id) {
  switch (id) {
    case VulnerabilityId::TokenLifetime:
    case VulnerabilityId::Sca:
      return SecurityDomain::Authentication;
    case VulnerabilityId::GranularScopes:
    case VulnerabilityId::TransparencyConsent:
    case VulnerabilityId::PrivilegePersistence:
    case VulnerabilityId::DiscoverySpoofing:
      return SecurityDomain::Authorization;
    case VulnerabilityId::ExcessiveExposure:
    case VulnerabilityId::SelfDisclosure:
    case VulnerabilityId::ConsentFatigue:
    case VulnerabilityId::ComplianceGaps:
      return SecurityDomain::Confidentiality;
    case VulnerabilityId::TamperMitm:
    case VulnerabilityId::ToolPoisoning:
      return SecurityDomain::Integrity;
    case VulnerabilityId::RegistryDos:
    case VulnerabilityId::SmartContract:
      return SecurityDomain::Availability;
  }
  throw std::logic_error("unknown vulnerability id");
}

std::string to_string(VulnerabilityId id) {
  switch (id) {
    case VulnerabilityId::TokenLifetime: return "TokenLifetime";
    case VulnerabilityId::Sca: return "SCA";
    case VulnerabilityId::GranularScopes: return "GranularScopes";
    case VulnerabilityId::TransparencyConsent: return "TransparencyConsent";
    case VulnerabilityId::PrivilegePersistence: return "PrivilegePersistence";
    case VulnerabilityId::DiscoverySpoofing: return "DiscoverySpoofing";
    case VulnerabilityId::ExcessiveExposure: return "ExcessiveExposure";
    case VulnerabilityId::SelfDisclosure: return "SelfDisclosure";
    case VulnerabilityId::ConsentFatigue: return "ConsentFatigue";
    case VulnerabilityId::ComplianceGaps: return "ComplianceGaps";
    case VulnerabilityId::TamperMitm: return "TamperMITM";
    case VulnerabilityId::ToolPoisoning: return "ToolPoisoning";
    case VulnerabilityId::RegistryDos: return "RegistryDoS";
    case VulnerabilityId::SmartContract: return "SmartContract";
  }
  throw std::logic_error("unknown vulnerability id");
}

std::string to_string(SecurityDomain d) {
  switch (d) {
    case SecurityDomain::Authentication: return "Authentication";
    case SecurityDomain::Authorization: return "Authorization";
    case SecurityDomain::Confidentiality: return "Confidentiality";
    case SecurityDomain::Integrity: return "Integrity";
    case SecurityDomain::Availability: return "Availability";
  }
  throw std::logic_error("unknown domain");
}

std::string to_string(ClassificationLabel l) {
  switch (l) {
    case ClassificationLabel::Mitigated: return "Mitigated";
    case ClassificationLabel::Vulnerable: return "Vulnerable";
    case ClassificationLabel::Partial: return "Partial";
    case ClassificationLabel::NotApplicable: return "NotApplicable";
    case ClassificationLabel::Theoretical: return "Theoretical";
  }
  throw std::logic_error("unknown label");
}

std::optional<VulnerabilityId> vulnerability_from_string(const std::string& s) {
  for (auto id : all_vulnerabilities())
    if (to_string(id) == s) return id;
  return std::nullopt;
}

std::optional<SecurityDomain> domain_from_string(const std::string& s) {
  for (auto d : all_domains())
    if (to_string(d) == s) return d;
  return std::nullopt;
}

std::optional<ClassificationLabel> label_from_string(const std::string& s) {
  for (auto l : {ClassificationLabel::Mitigated, ClassificationLabel::Vulnerable,
                 ClassificationLabel::Partial, ClassificationLabel::NotApplicable,
                 ClassificationLabel::Theoretical})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

std::string display_name(VulnerabilityId id) {
  switch (id) {
    case VulnerabilityId::TokenLifetime: return "Absence of Token Lifetime Limits";
    case VulnerabilityId::Sca: return "Lack of Strong Customer Authentication (SCA)";
    case VulnerabilityId::GranularScopes: return "Insufficiently Granular Scopes";
    case VulnerabilityId::TransparencyConsent: return "Lack of Transparency & Consent";
    case VulnerabilityId::PrivilegePersistence: return "Privilege Persistence / Version Drift";
    case VulnerabilityId::DiscoverySpoofing: return "Spoofing in Discovery Mechanisms";
    case VulnerabilityId::ExcessiveExposure: return "Excessive Exposure of Data";
    case VulnerabilityId::SelfDisclosure: return "Risk of Data Disclosure (Internal)";
    case VulnerabilityId::ConsentFatigue: return "Consent Fatigue in Multi-Transaction Workflows";
    case VulnerabilityId::ComplianceGaps: return "Regulatory Compliance Gaps";
    case VulnerabilityId::TamperMitm: return "Message Tampering / MITM";
    case VulnerabilityId::ToolPoisoning: return "Tool Poisoning / Command Injection";
    case VulnerabilityId::RegistryDos: return "Registry Pollution / DoS";
    case VulnerabilityId::SmartContract: return "Smart Contract Vulnerabilities";
  }
  throw std::logic_error("unknown vulnerability id");
}

std::string display_name(SecurityDomain d) {
  switch (d) {
    case SecurityDomain::Authentication: return "Authentication & Session Management";
    case SecurityDomain::Authorization: return "Authorization & Access Control";
    case SecurityDomain::Confidentiality: return "Confidentiality & Isolation";
    case SecurityDomain::Integrity: return "Data Integrity";
    case SecurityDomain::Availability: return "Availability & Platform Risks";
  }
  throw std::logic_error("unknown domain");
}

std::optional<std::string> cwe_of(VulnerabilityId id) {
  switch (id) {
    case VulnerabilityId::TokenLifetime: return "CWE-613";
    case VulnerabilityId::Sca: return "CWE-306";
    case VulnerabilityId::GranularScopes: return "CWE-1220";
    case VulnerabilityId::TransparencyConsent: return "CWE-200";
    case VulnerabilityId::PrivilegePersistence: return "CWE-284";
    case VulnerabilityId::DiscoverySpoofing: return "CWE-290";
    case VulnerabilityId::ExcessiveExposure: return "CWE-200";
    case VulnerabilityId::SelfDisclosure: return "CWE-209";
    case VulnerabilityId::TamperMitm: return "CWE-300";
    case VulnerabilityId::ToolPoisoning: return "CWE-77";
    case VulnerabilityId::RegistryDos: return "CWE-400";
    case VulnerabilityId::SmartContract: return "CWE-841";
    case VulnerabilityId::ConsentFatigue:
    case VulnerabilityId::ComplianceGaps:
      return std::nullopt;
  }
  throw std::logic_error("unknown vulnerability id");
}

std::string glyph(ClassificationLabel l) {
  switch (l) {
    case ClassificationLabel::Mitigated: return "✓";      // ✓
    case ClassificationLabel::Vulnerable: return "✗";     // ✗
    case ClassificationLabel::Partial: return "◑";        // ◑
    case ClassificationLabel::Theoretical: return "◈";    // ◈
    case ClassificationLabel::NotApplicable: return "—";  // —
  }
  throw std::logic_error("unknown label");
}

namespace {

void require_scorable(std::span<const TrialOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("no trial outcomes to score");
  for (const auto& o : outcomes) {
    if (o.vector_name != outcomes.front().vector_name)
      throw std::invalid_argument("outcomes span multiple attack vectors");
    if (o.impact < 0.0 || o.impact > 1.0)
      throw std::invalid_argument("trial impact outside [0,1]");
  }
}

}  // namespace

double defense_success(std::span<const TrialOutcome> outcomes) {
  require_scorable(outcomes);
  size_t blocked = 0;
  for (const auto& o : outcomes)
    if (!o.attack_succeeded) ++blocked;
  return 100.0 * static_cast<double>(blocked) / static_cast<double>(outcomes.size());
}

double mean_impact(std::span<const TrialOutcome> outcomes) {
  require_scorable(outcomes);
  double sum = 0.0;
  for (const auto& o : outcomes) sum += o.impact;
  return sum / static_cast<double>(outcomes.size());
}

ClassificationLabel classify_vector(std::span<const TrialOutcome> outcomes,
                                    bool posture_dependent,
                                    std::optional<ClassificationLabel> override_label) {
  if (override_label) return *override_label;
  if (outcomes.empty()) throw std::invalid_argument("no trial outcomes and no override");
  size_t blocked = 0;
  for (const auto& o : outcomes)
    if (!o.attack_succeeded) ++blocked;
  if (posture_dependent) return ClassificationLabel::Partial;
  if (blocked == outcomes.size()) return ClassificationLabel::Mitigated;
  if (blocked == 0) return ClassificationLabel::Vulnerable;
  return ClassificationLabel::Partial;
}

std::string ProtocolMatrix::column_label() const {
  return protocol + " (" + taxonomy::to_string(provenance) + ")";
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Empirical: return "Empirical";
    case Provenance::Literature: return "Literature";
  }
  throw std::logic_error("unknown provenance");
}

ExposureSummary exposure_score(int confirmed, int partial) {
  if (confirmed < 0 || partial < 0)
    throw std::invalid_argument("negative vulnerability counts");
  ExposureSummary s;
  s.confirmed = confirmed;
  s.partial = partial;
  s.score = static_cast<double>(confirmed) + 0.5 * static_cast<double>(partial);
  return s;
}

ExposureSummary recount_exposure(const ProtocolMatrix& m) {
  if (!m.complete()) throw std::invalid_argument("matrix is missing vulnerability rows");
  int confirmed = 0;
  int partial = 0;
  for (const auto& [id, label] : m.entries) {
    if (label == ClassificationLabel::Vulnerable) ++confirmed;
    if (label == ClassificationLabel::Partial) ++partial;
  }
  return exposure_score(confirmed, partial);
}

DomainScore domain_mitigation(const ProtocolMatrix& m, SecurityDomain d) {
  if (!m.complete()) throw std::invalid_argument("matrix is missing vulnerability rows");
  double sum = 0.0;
  int counted = 0;
  for (auto id : all_vulnerabilities()) {
    if (domain_of(id) != d) continue;
    ClassificationLabel label = m.entries.at(id);
    if (label == ClassificationLabel::NotApplicable) continue;
    switch (label) {
      case ClassificationLabel::Mitigated: sum += 3.0; break;
      case ClassificationLabel::Partial: sum += 1.5; break;
      case ClassificationLabel::Vulnerable:
      case ClassificationLabel::Theoretical: break;
      case ClassificationLabel::NotApplicable: break;  // unreachable
    }
    ++counted;
  }
  if (counted == 0) return DomainScore{0.0, true};
  return DomainScore{sum / static_cast<double>(counted), false};
}

}  // namespace agentsec::taxonomy
