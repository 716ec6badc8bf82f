#include "agentsec/taxonomy.hpp"

#include <gtest/gtest.h>

#include <random>

#include "matrix_fixtures.hpp"

namespace tax = agentsec::taxonomy;
using tax::ClassificationLabel;
using tax::SecurityDomain;
using tax::TrialOutcome;
using tax::VulnerabilityId;

namespace {

std::vector<TrialOutcome> outcomes(int blocked, int succeeded, double success_impact = 1.0) {
  std::vector<TrialOutcome> out;
  for (int i = 0; i < blocked; ++i)
    out.push_back({"vec", false, 0.0, false, 400, "blocked"});
  for (int i = 0; i < succeeded; ++i)
    out.push_back({"vec", true, success_impact, false, 200, "succeeded"});
  return out;
}

}  // namespace

TEST(Taxonomy, FourteenVulnerabilitiesInFiveDomains) {
  ASSERT_EQ(tax::all_vulnerabilities().size(), 14u);
  ASSERT_EQ(tax::all_domains().size(), 5u);
  std::map<SecurityDomain, int> counts;
  for (auto id : tax::all_vulnerabilities()) counts[tax::domain_of(id)]++;
  EXPECT_EQ(counts[SecurityDomain::Authentication], 2);
  EXPECT_EQ(counts[SecurityDomain::Authorization], 4);
  EXPECT_EQ(counts[SecurityDomain::Confidentiality], 4);
  EXPECT_EQ(counts[SecurityDomain::Integrity], 2);
  EXPECT_EQ(counts[SecurityDomain::Availability], 2);
}

TEST(Taxonomy, StringRoundTrips) {
  for (auto id : tax::all_vulnerabilities()) {
    auto parsed = tax::vulnerability_from_string(tax::to_string(id));
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(*parsed, id);
  }
  EXPECT_EQ(tax::to_string(VulnerabilityId::Sca), "SCA");
  EXPECT_EQ(tax::to_string(VulnerabilityId::TamperMitm), "TamperMITM");
  EXPECT_EQ(tax::to_string(VulnerabilityId::RegistryDos), "RegistryDoS");
  EXPECT_FALSE(tax::vulnerability_from_string("NotAVuln").has_value());
}

TEST(Taxonomy, Glyphs) {
  EXPECT_EQ(tax::glyph(ClassificationLabel::Mitigated), "✓");
  EXPECT_EQ(tax::glyph(ClassificationLabel::Vulnerable), "✗");
  EXPECT_EQ(tax::glyph(ClassificationLabel::Partial), "◑");
  EXPECT_EQ(tax::glyph(ClassificationLabel::Theoretical), "◈");
  EXPECT_EQ(tax::glyph(ClassificationLabel::NotApplicable), "—");
}

TEST(Scoring, DefenseSuccessPercentage) {
  auto all_blocked = outcomes(50, 0);
  auto none_blocked = outcomes(0, 50);
  auto half = outcomes(25, 25);
  EXPECT_DOUBLE_EQ(tax::defense_success(all_blocked), 100.0);
  EXPECT_DOUBLE_EQ(tax::defense_success(none_blocked), 0.0);
  EXPECT_DOUBLE_EQ(tax::defense_success(half), 50.0);
}

TEST(Scoring, MeanImpact) {
  auto zero = outcomes(50, 0);
  EXPECT_DOUBLE_EQ(tax::mean_impact(zero), 0.0);
  auto full = outcomes(0, 50);
  EXPECT_DOUBLE_EQ(tax::mean_impact(full), 1.0);
  auto mixed = outcomes(30, 20);
  EXPECT_DOUBLE_EQ(tax::mean_impact(mixed), 0.4);
}

TEST(Scoring, EmptyAndMixedSpansRejected) {
  std::vector<TrialOutcome> empty;
  EXPECT_THROW(tax::defense_success(empty), std::invalid_argument);
  EXPECT_THROW(tax::mean_impact(empty), std::invalid_argument);

  std::vector<TrialOutcome> mixed = outcomes(1, 0);
  mixed.push_back({"other-vec", true, 1.0, false, 200, ""});
  EXPECT_THROW(tax::defense_success(mixed), std::invalid_argument);

  std::vector<TrialOutcome> bad_impact = {{"vec", true, 1.5, false, 200, ""}};
  EXPECT_THROW(tax::mean_impact(bad_impact), std::invalid_argument);
}

TEST(Classify, FullBlockIsMitigated) {
  auto o = outcomes(50, 0);
  EXPECT_EQ(tax::classify_vector(o, false), ClassificationLabel::Mitigated);
}

TEST(Classify, NoBlockIsVulnerable) {
  auto o = outcomes(0, 50);
  EXPECT_EQ(tax::classify_vector(o, false), ClassificationLabel::Vulnerable);
}

TEST(Classify, MixedIsPartial) {
  auto o = outcomes(10, 40);
  EXPECT_EQ(tax::classify_vector(o, false), ClassificationLabel::Partial);
}

// A defense that only exists as an optional control (off in default
// deployments) classifies Partial even when the measured posture blocked
// nothing: strict deployments would have blocked everything.
TEST(Classify, PostureDependentControlIsPartial) {
  auto none_blocked = outcomes(0, 50);
  EXPECT_EQ(tax::classify_vector(none_blocked, true), ClassificationLabel::Partial);
  auto all_blocked = outcomes(50, 0);
  EXPECT_EQ(tax::classify_vector(all_blocked, true), ClassificationLabel::Partial);
}

TEST(Classify, OverridePassesThrough) {
  std::vector<TrialOutcome> empty;
  EXPECT_EQ(tax::classify_vector(empty, false, ClassificationLabel::Theoretical),
            ClassificationLabel::Theoretical);
  auto o = outcomes(0, 50);
  EXPECT_EQ(tax::classify_vector(o, false, ClassificationLabel::NotApplicable),
            ClassificationLabel::NotApplicable);
  EXPECT_THROW(tax::classify_vector(empty, false), std::invalid_argument);
}

TEST(Exposure, ScoreIsConfirmedPlusHalfPartial) {
  EXPECT_DOUBLE_EQ(tax::exposure_score(12, 0).score, 12.0);
  EXPECT_DOUBLE_EQ(tax::exposure_score(5, 4).score, 7.0);
  EXPECT_DOUBLE_EQ(tax::exposure_score(6, 6).score, 9.0);
  EXPECT_DOUBLE_EQ(tax::exposure_score(0, 0).score, 0.0);
  EXPECT_THROW(tax::exposure_score(-1, 0), std::invalid_argument);
}

// Linearity property: score(a+c, b+d) == score(a,b) + score(c,d).
TEST(Exposure, ScoreIsLinear) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    int a = static_cast<int>(rng() % 15);
    int b = static_cast<int>(rng() % 15);
    int c = static_cast<int>(rng() % 15);
    int d = static_cast<int>(rng() % 15);
    EXPECT_DOUBLE_EQ(tax::exposure_score(a + c, b + d).score,
                     tax::exposure_score(a, b).score + tax::exposure_score(c, d).score);
  }
}

TEST(Exposure, RecountsReferenceMatrices) {
  auto a2a = tax::recount_exposure(agentsec::testfix::a2a_reference());
  EXPECT_EQ(a2a.confirmed, 12);
  EXPECT_EQ(a2a.partial, 0);
  EXPECT_DOUBLE_EQ(a2a.score, 12.0);

  auto coral = tax::recount_exposure(agentsec::testfix::coral_reference());
  EXPECT_EQ(coral.confirmed, 4);
  EXPECT_EQ(coral.partial, 0);
  EXPECT_DOUBLE_EQ(coral.score, 4.0);

  auto acp = tax::recount_exposure(agentsec::testfix::acp_reference());
  EXPECT_EQ(acp.confirmed, 4);
  EXPECT_EQ(acp.partial, 8);
  EXPECT_DOUBLE_EQ(acp.score, 8.0);
}

TEST(DomainMitigation, WorkedExamples) {
  auto coral = agentsec::testfix::coral_reference();
  // Integrity: {Mitigated, Theoretical} -> (3.0 + 0.0) / 2.
  auto integrity = tax::domain_mitigation(coral, SecurityDomain::Integrity);
  EXPECT_FALSE(integrity.not_applicable);
  EXPECT_DOUBLE_EQ(integrity.value, 1.5);
  // Authorization: {Vulnerable, Theoretical, Mitigated, Vulnerable} -> 0.75.
  auto authz = tax::domain_mitigation(coral, SecurityDomain::Authorization);
  EXPECT_DOUBLE_EQ(authz.value, 0.75);

  auto acp = agentsec::testfix::acp_reference();
  // Authorization: {Mitigated, Partial, Partial, Partial} -> 7.5 / 4.
  EXPECT_DOUBLE_EQ(tax::domain_mitigation(acp, SecurityDomain::Authorization).value, 1.875);
  // Confidentiality: {Vulnerable, Partial, Partial, Partial} -> 4.5 / 4.
  EXPECT_DOUBLE_EQ(tax::domain_mitigation(acp, SecurityDomain::Confidentiality).value, 1.125);
  // Availability: {Vulnerable, NotApplicable} -> NA excluded, mean over one.
  auto acp_avail = tax::domain_mitigation(acp, SecurityDomain::Availability);
  EXPECT_FALSE(acp_avail.not_applicable);
  EXPECT_DOUBLE_EQ(acp_avail.value, 0.0);
}

TEST(DomainMitigation, AllNotApplicableDomainFlagsNa) {
  auto a2a = agentsec::testfix::a2a_reference();
  auto avail = tax::domain_mitigation(a2a, SecurityDomain::Availability);
  EXPECT_TRUE(avail.not_applicable);
  EXPECT_DOUBLE_EQ(avail.value, 0.0);
  // All-Vulnerable domains score 0 but are applicable.
  auto authn = tax::domain_mitigation(a2a, SecurityDomain::Authentication);
  EXPECT_FALSE(authn.not_applicable);
  EXPECT_DOUBLE_EQ(authn.value, 0.0);
}

// Monotonicity: upgrading any single cell (Vulnerable -> Partial ->
// Mitigated) never lowers its domain score.
TEST(DomainMitigation, MonotoneUnderCellUpgrades) {
  auto base = agentsec::testfix::acp_reference();
  for (auto id : tax::all_vulnerabilities()) {
    auto label = base.entries.at(id);
    auto upgraded = base;
    if (label == ClassificationLabel::Vulnerable)
      upgraded.entries[id] = ClassificationLabel::Partial;
    else if (label == ClassificationLabel::Partial)
      upgraded.entries[id] = ClassificationLabel::Mitigated;
    else
      continue;
    auto d = tax::domain_of(id);
    EXPECT_GE(tax::domain_mitigation(upgraded, d).value,
              tax::domain_mitigation(base, d).value);
  }
}

TEST(DomainMitigation, IncompleteMatrixRejected) {
  auto m = agentsec::testfix::coral_reference();
  m.entries.erase(VulnerabilityId::Sca);
  EXPECT_THROW(tax::domain_mitigation(m, SecurityDomain::Authentication), std::invalid_argument);
  EXPECT_THROW(tax::recount_exposure(m), std::invalid_argument);
}

TEST(Matrix, ColumnLabel) {
  EXPECT_EQ(agentsec::testfix::coral_reference().column_label(), "CORAL (Empirical)");
  EXPECT_EQ(agentsec::testfix::a2a_reference().column_label(), "A2A (Literature)");
}
