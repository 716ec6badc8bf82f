// Frozen reference matrices used across scoring / emitter / acceptance tests.
// These are the expected end states of the lab's three protocol columns; the
// experiment pipeline must reproduce them cell-for-cell.
#pragma once

#include <map>

#include "agentsec/taxonomy.hpp"

namespace agentsec::testfix {

using taxonomy::ClassificationLabel;
using taxonomy::ProtocolMatrix;
using taxonomy::Provenance;
using taxonomy::VulnerabilityId;

inline ProtocolMatrix make_matrix(const std::string& protocol, Provenance prov,
                                  std::map<VulnerabilityId, ClassificationLabel> entries) {
  ProtocolMatrix m;
  m.protocol = protocol;
  m.provenance = prov;
  m.entries = std::move(entries);
  return m;
}

// A2A baseline (literature survey): everything exposed, no registry broker
// and no contract layer.
inline ProtocolMatrix a2a_reference() {
  using L = ClassificationLabel;
  using V = VulnerabilityId;
  return make_matrix("A2A", Provenance::Literature,
                     {
                         {V::TokenLifetime, L::Vulnerable},
                         {V::Sca, L::Vulnerable},
                         {V::GranularScopes, L::Vulnerable},
                         {V::TransparencyConsent, L::Vulnerable},
                         {V::PrivilegePersistence, L::Vulnerable},
                         {V::DiscoverySpoofing, L::Vulnerable},
                         {V::ExcessiveExposure, L::Vulnerable},
                         {V::SelfDisclosure, L::Vulnerable},
                         {V::ConsentFatigue, L::Vulnerable},
                         {V::ComplianceGaps, L::Vulnerable},
                         {V::TamperMitm, L::Vulnerable},
                         {V::ToolPoisoning, L::Vulnerable},
                         {V::RegistryDos, L::NotApplicable},
                         {V::SmartContract, L::NotApplicable},
                     });
}

// ACP under its experimental posture (first-part-only signature checking).
inline ProtocolMatrix acp_reference() {
  using L = ClassificationLabel;
  using V = VulnerabilityId;
  return make_matrix("ACP", Provenance::Empirical,
                     {
                         {V::TokenLifetime, L::Partial},
                         {V::Sca, L::Partial},
                         {V::GranularScopes, L::Mitigated},
                         {V::TransparencyConsent, L::Partial},
                         {V::PrivilegePersistence, L::Partial},
                         {V::DiscoverySpoofing, L::Partial},
                         {V::ExcessiveExposure, L::Vulnerable},
                         {V::SelfDisclosure, L::Partial},
                         {V::ConsentFatigue, L::Partial},
                         {V::ComplianceGaps, L::Partial},
                         {V::TamperMitm, L::Vulnerable},
                         {V::ToolPoisoning, L::Vulnerable},
                         {V::RegistryDos, L::Vulnerable},
                         {V::SmartContract, L::NotApplicable},
                     });
}

// CORAL as published: open SSE gateway, but transport-locked writes and
// session-scoped dispatch hold.
inline ProtocolMatrix coral_reference() {
  using L = ClassificationLabel;
  using V = VulnerabilityId;
  return make_matrix("CORAL", Provenance::Empirical,
                     {
                         {V::TokenLifetime, L::Theoretical},
                         {V::Sca, L::Vulnerable},
                         {V::GranularScopes, L::Vulnerable},
                         {V::TransparencyConsent, L::Theoretical},
                         {V::PrivilegePersistence, L::Mitigated},
                         {V::DiscoverySpoofing, L::Vulnerable},
                         {V::ExcessiveExposure, L::Mitigated},
                         {V::SelfDisclosure, L::Theoretical},
                         {V::ConsentFatigue, L::Theoretical},
                         {V::ComplianceGaps, L::Theoretical},
                         {V::TamperMitm, L::Mitigated},
                         {V::ToolPoisoning, L::Theoretical},
                         {V::RegistryDos, L::Vulnerable},
                         {V::SmartContract, L::Theoretical},
                     });
}

}  // namespace agentsec::testfix
