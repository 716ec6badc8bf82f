// The adversarial client: parameterized attack procedures that drive a SUT
// through its public wire surface and record one TrialOutcome per trial.
// Every vector is deterministic in (seed, posture) on the in-process
// backend: per-trial SUT resets, seeded attacker randomness, corpus-driven
// payloads, and a synthetic clock.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentsec/acp.hpp"
#include "agentsec/clock.hpp"
#include "agentsec/coral.hpp"
#include "agentsec/corpus.hpp"
#include "agentsec/taxonomy.hpp"
#include "agentsec/wire.hpp"

namespace agentsec::attacks {

enum class Sut { Coral, Acp };

std::string to_string(Sut sut);
std::optional<Sut> sut_from_string(const std::string& s);

enum class AttackVectorId {
  ScaImpersonation,
  AgentSpoofing,
  TamperForge,
  ReplayMessage,
  CrossSessionProbe,
  PiiExfiltration,
  ErrorProbe,
  SessionFlood,
  RegistryFlood,
  ScopeOverreach,
  TokenLifetimeAbuse,
};

std::string to_string(AttackVectorId id);
std::optional<AttackVectorId> vector_from_string(const std::string& s);

struct VectorInfo {
  AttackVectorId id = AttackVectorId::ScaImpersonation;
  taxonomy::VulnerabilityId maps_to = taxonomy::VulnerabilityId::Sca;
  bool coral_applicable = false;
  bool acp_applicable = false;
  // Evidence-only vectors feed auxiliary evidence into reports; they never
  // classify a matrix row by themselves.
  bool evidence_only = false;
};

const std::vector<VectorInfo>& vector_table();
const VectorInfo& info(AttackVectorId id);
bool applicable(AttackVectorId id, Sut sut);

// Error-body probe list: substrings whose appearance in any response would
// count as internal self-disclosure (stack frames, runtime banners, ...).
// fixtures/internal_markers.txt mirrors this list.
const std::vector<std::string>& internal_markers();

struct AttackConfig {
  int trials = 50;
  std::uint64_t seed = 42;
  int flood_count = 20;
  std::shared_ptr<ManualClock> clock;  // shared with the Lab under attack
};

struct VectorNotApplicable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One SUT instance behind a wire server — the unit a vector attacks.
// Exactly one of coral_app/acp_app is set, matching `sut`.
struct Lab {
  Sut sut = Sut::Coral;
  std::shared_ptr<coral::CoralServer> coral_app;
  std::shared_ptr<acp::AcpServer> acp_app;
  std::unique_ptr<wire::Server> server;
  std::unique_ptr<wire::Client> client;
};

Lab make_coral_lab(coral::CoralPosture posture, wire::Backend backend,
                   std::shared_ptr<ManualClock> clock, std::uint64_t seed);
Lab make_acp_lab(acp::AcpPosture posture, wire::Backend backend,
                 std::shared_ptr<ManualClock> clock, std::uint64_t seed);

// Runs one vector for config.trials trials, resetting the SUT between
// trials (flood vectors accumulate within a trial, never across). Throws
// VectorNotApplicable when the vector does not target lab.sut.
std::vector<taxonomy::TrialOutcome> run_vector(AttackVectorId id, Lab& lab,
                                               const AttackConfig& config);

}  // namespace agentsec::attacks
