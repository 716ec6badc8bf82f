#include "agentsec/experiment.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace agentsec::bench {

namespace {

using json = nlohmann::json;
using taxonomy::ClassificationLabel;
using taxonomy::VulnerabilityId;
using taxonomy::VulnerabilityReport;

ClassificationLabel merge_labels(const std::vector<ClassificationLabel>& labels) {
  bool any_partial = false;
  for (auto l : labels) {
    if (l == ClassificationLabel::Vulnerable) return ClassificationLabel::Vulnerable;
    if (l == ClassificationLabel::Partial) any_partial = true;
  }
  return any_partial ? ClassificationLabel::Partial : ClassificationLabel::Mitigated;
}

json config_to_json(const ExperimentConfig& c) {
  json overrides = json::object();
  for (const auto& [id, label] : c.overrides)
    overrides[taxonomy::to_string(id)] = taxonomy::to_string(label);
  json vectors = json::array();
  for (auto v : c.vectors) vectors.push_back(attacks::to_string(v));
  json dependent = json::array();
  for (auto id : c.posture_dependent) dependent.push_back(taxonomy::to_string(id));
  return json{
      {"backend", wire::to_string(c.backend)},
      {"clock_origin_ms", c.clock_origin_ms},
      {"flood_count", c.flood_count},
      {"overrides", overrides},
      {"posture", c.posture},
      {"posture_dependent", dependent},
      {"protocol", c.protocol_name},
      {"seed", c.seed},
      {"sut", attacks::to_string(c.sut)},
      {"trials", c.trials},
      {"vectors", vectors},
  };
}

// Strict field readers: wrong shape -> ReportParseError.
const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ReportParseError(std::string("missing key: ") + key);
  return *it;
}

void expect_keys(const json& j, const std::vector<std::string>& allowed,
                 const std::string& where) {
  if (!j.is_object()) throw ReportParseError(where + " is not an object");
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ReportParseError("unknown key in " + where + ": " + key);
}

VulnerabilityId parse_vul(const json& j) {
  if (!j.is_string()) throw ReportParseError("vulnerability id is not a string");
  auto id = taxonomy::vulnerability_from_string(j.get<std::string>());
  if (!id) throw ReportParseError("unknown vulnerability: " + j.get<std::string>());
  return *id;
}

ClassificationLabel parse_label(const json& j) {
  if (!j.is_string()) throw ReportParseError("label is not a string");
  auto label = taxonomy::label_from_string(j.get<std::string>());
  if (!label) throw ReportParseError("unknown label: " + j.get<std::string>());
  return *label;
}

ExperimentConfig config_from_json(const json& j) {
  expect_keys(j,
              {"backend", "clock_origin_ms", "flood_count", "overrides", "posture",
               "posture_dependent", "protocol", "seed", "sut", "trials", "vectors"},
              "config");
  ExperimentConfig c;
  auto backend = backend_from_string(field(j, "backend").get<std::string>());
  if (!backend) throw ReportParseError("unknown backend");
  c.backend = *backend;
  c.clock_origin_ms = field(j, "clock_origin_ms").get<std::int64_t>();
  c.flood_count = field(j, "flood_count").get<int>();
  c.posture = field(j, "posture").get<std::string>();
  c.protocol_name = field(j, "protocol").get<std::string>();
  c.seed = field(j, "seed").get<std::uint64_t>();
  auto sut = attacks::sut_from_string(field(j, "sut").get<std::string>());
  if (!sut) throw ReportParseError("unknown sut");
  c.sut = *sut;
  c.trials = field(j, "trials").get<int>();
  for (const auto& [key, value] : field(j, "overrides").items()) {
    auto id = taxonomy::vulnerability_from_string(key);
    if (!id) throw ReportParseError("unknown vulnerability: " + key);
    c.overrides[*id] = parse_label(value);
  }
  for (const auto& v : field(j, "vectors")) {
    auto id = attacks::vector_from_string(v.get<std::string>());
    if (!id) throw ReportParseError("unknown vector: " + v.get<std::string>());
    c.vectors.push_back(*id);
  }
  for (const auto& v : field(j, "posture_dependent")) c.posture_dependent.insert(parse_vul(v));
  return c;
}

}  // namespace

std::optional<wire::Backend> backend_from_string(const std::string& s) {
  if (s == "in-process") return wire::Backend::InProcess;
  if (s == "loopback") return wire::Backend::Loopback;
  return std::nullopt;
}

bool valid_posture(attacks::Sut sut, const std::string& name) {
  if (sut == attacks::Sut::Coral) return name == "as-published" || name == "hardened";
  return name == "none" || name == "partial" || name == "strict";
}

coral::CoralPosture coral_posture(const std::string& name) {
  if (name == "as-published") return coral::CoralPosture::as_published();
  if (name == "hardened") return coral::CoralPosture::hardened();
  throw std::invalid_argument("unknown coral posture: " + name);
}

acp::AcpPosture acp_posture(const std::string& name) {
  if (name == "none") return acp::AcpPosture::none();
  if (name == "partial") return acp::AcpPosture::partial();
  if (name == "strict") return acp::AcpPosture::strict();
  throw std::invalid_argument("unknown acp posture: " + name);
}

ExperimentConfig default_config(attacks::Sut sut, const std::string& posture) {
  if (!valid_posture(sut, posture))
    throw std::invalid_argument("unknown posture for " + attacks::to_string(sut) + ": " + posture);
  using V = attacks::AttackVectorId;
  using L = ClassificationLabel;
  ExperimentConfig c;
  c.sut = sut;
  c.posture = posture;
  if (sut == attacks::Sut::Coral) {
    c.protocol_name = "CORAL";
    c.vectors = {V::ScaImpersonation, V::AgentSpoofing,   V::TamperForge, V::ReplayMessage,
                 V::CrossSessionProbe, V::ErrorProbe,      V::SessionFlood};
    c.overrides = {
        {VulnerabilityId::TokenLifetime, L::Theoretical},
        {VulnerabilityId::GranularScopes, L::Vulnerable},
        {VulnerabilityId::TransparencyConsent, L::Theoretical},
        {VulnerabilityId::PrivilegePersistence, L::Mitigated},
        {VulnerabilityId::SelfDisclosure, L::Theoretical},
        {VulnerabilityId::ConsentFatigue, L::Theoretical},
        {VulnerabilityId::ComplianceGaps, L::Theoretical},
        {VulnerabilityId::ToolPoisoning, L::Theoretical},
        {VulnerabilityId::SmartContract, L::Theoretical},
    };
  } else {
    c.protocol_name = "ACP";
    c.vectors = {V::TamperForge, V::ReplayMessage, V::PiiExfiltration, V::ScopeOverreach,
                 V::RegistryFlood};
    c.overrides = {
        {VulnerabilityId::TokenLifetime, L::Partial},
        {VulnerabilityId::Sca, L::Partial},
        {VulnerabilityId::TransparencyConsent, L::Partial},
        {VulnerabilityId::PrivilegePersistence, L::Partial},
        {VulnerabilityId::DiscoverySpoofing, L::Partial},
        {VulnerabilityId::SelfDisclosure, L::Partial},
        {VulnerabilityId::ConsentFatigue, L::Partial},
        {VulnerabilityId::ComplianceGaps, L::Partial},
        {VulnerabilityId::ToolPoisoning, L::Vulnerable},
        {VulnerabilityId::SmartContract, L::NotApplicable},
    };
  }
  return c;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (!valid_posture(config.sut, config.posture))
    throw std::invalid_argument("unknown posture for " + attacks::to_string(config.sut) + ": " +
                                config.posture);
  if (config.vectors.empty()) throw std::invalid_argument("no vectors configured");
  if (config.protocol_name.empty()) throw std::invalid_argument("protocol name is empty");

  std::set<attacks::AttackVectorId> seen;
  std::set<VulnerabilityId> executed;  // rows classified by a vector
  for (auto v : config.vectors) {
    if (!attacks::applicable(v, config.sut))
      throw std::invalid_argument(attacks::to_string(v) + " does not target " +
                                  attacks::to_string(config.sut));
    if (!seen.insert(v).second)
      throw std::invalid_argument("duplicate vector: " + attacks::to_string(v));
    if (!attacks::info(v).evidence_only) executed.insert(attacks::info(v).maps_to);
  }
  for (const auto& [id, label] : config.overrides)
    if (executed.count(id))
      throw std::invalid_argument("override collides with executed vector for " +
                                  taxonomy::to_string(id));
  for (auto id : taxonomy::all_vulnerabilities())
    if (!executed.count(id) && !config.overrides.count(id))
      throw std::invalid_argument("no classification source for " + taxonomy::to_string(id));

  // One lab, one synthetic clock; vectors run sequentially in config order.
  auto clock = std::make_shared<ManualClock>(Instant{config.clock_origin_ms});
  attacks::Lab lab = config.sut == attacks::Sut::Coral
                         ? attacks::make_coral_lab(coral_posture(config.posture), config.backend,
                                                   clock, config.seed)
                         : attacks::make_acp_lab(acp_posture(config.posture), config.backend,
                                                 clock, config.seed);
  attacks::AttackConfig attack_config;
  attack_config.trials = config.trials;
  attack_config.seed = config.seed;
  attack_config.flood_count = config.flood_count;
  attack_config.clock = clock;

  struct RowData {
    std::vector<std::string> vectors;
    std::vector<ClassificationLabel> vector_labels;  // non-evidence-only
    int trials = 0;
    int blocked = 0;
    double impact_sum = 0.0;
  };
  std::map<VulnerabilityId, RowData> rows;

  for (auto vector_id : config.vectors) {
    auto outcomes = attacks::run_vector(vector_id, lab, attack_config);
    const auto& vinfo = attacks::info(vector_id);
    RowData& row = rows[vinfo.maps_to];
    row.vectors.push_back(attacks::to_string(vector_id));
    row.trials += static_cast<int>(outcomes.size());
    for (const auto& o : outcomes) {
      if (!o.attack_succeeded) ++row.blocked;
      row.impact_sum += o.impact;
    }
    if (!vinfo.evidence_only)
      row.vector_labels.push_back(taxonomy::classify_vector(
          outcomes, config.posture_dependent.count(vinfo.maps_to) > 0));
  }

  ExperimentReport report;
  report.config = config;
  report.matrix.protocol = config.protocol_name;
  report.matrix.provenance = taxonomy::Provenance::Empirical;
  for (auto id : taxonomy::all_vulnerabilities()) {
    VulnerabilityReport row;
    row.id = id;
    auto data = rows.find(id);
    if (data != rows.end()) {
      row.trials = data->second.trials;
      row.defense_success_pct =
          row.trials == 0 ? 0.0 : 100.0 * data->second.blocked / row.trials;
      row.mean_impact = row.trials == 0 ? 0.0 : data->second.impact_sum / row.trials;
      row.vectors = data->second.vectors;
    }
    auto override_it = config.overrides.find(id);
    if (override_it != config.overrides.end())
      row.label = override_it->second;
    else
      row.label = merge_labels(data->second.vector_labels);
    report.matrix.entries[id] = row.label;
    report.vulnerabilities.push_back(std::move(row));
  }
  report.exposure = taxonomy::recount_exposure(report.matrix);
  for (auto d : taxonomy::all_domains())
    report.domains[d] = taxonomy::domain_mitigation(report.matrix, d);
  return report;
}

std::string serialize_report(const ExperimentReport& report) {
  json vulnerabilities = json::array();
  for (const auto& row : report.vulnerabilities) {
    json vectors = json::array();
    for (const auto& v : row.vectors) vectors.push_back(v);
    vulnerabilities.push_back(json{
        {"defense_success_pct", row.defense_success_pct},
        {"id", taxonomy::to_string(row.id)},
        {"label", taxonomy::to_string(row.label)},
        {"mean_impact", row.mean_impact},
        {"trials", row.trials},
        {"vectors", vectors},
    });
  }
  json entries = json::object();
  for (const auto& [id, label] : report.matrix.entries)
    entries[taxonomy::to_string(id)] = taxonomy::to_string(label);
  json domains = json::object();
  for (const auto& [domain, score] : report.domains)
    domains[taxonomy::to_string(domain)] = json{{"na", score.not_applicable},
                                                {"value", score.value}};
  json doc{
      {"config", config_to_json(report.config)},
      {"domains", domains},
      {"exposure", json{{"confirmed", report.exposure.confirmed},
                        {"partial", report.exposure.partial},
                        {"score", report.exposure.score}}},
      {"matrix", json{{"entries", entries},
                      {"protocol", report.matrix.protocol},
                      {"provenance", taxonomy::to_string(report.matrix.provenance)}}},
      {"meta", json{{"backend", wire::to_string(report.config.backend)},
                    {"clock_origin_ms", report.config.clock_origin_ms},
                    {"domain_aggregation", "mean"},
                    {"format", "agentsec-report.v1"},
                    {"seed", report.config.seed}}},
      {"vulnerabilities", vulnerabilities},
  };
  return doc.dump(2) + "\n";
}

ExperimentReport parse_report(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ReportParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    expect_keys(doc, {"config", "domains", "exposure", "matrix", "meta", "vulnerabilities"},
                "report");
    const json& meta = field(doc, "meta");
    if (field(meta, "format").get<std::string>() != "agentsec-report.v1")
      throw ReportParseError("unsupported report format");

    ExperimentReport report;
    report.config = config_from_json(field(doc, "config"));

    for (const auto& row : field(doc, "vulnerabilities")) {
      expect_keys(row, {"defense_success_pct", "id", "label", "mean_impact", "trials", "vectors"},
                  "vulnerability row");
      VulnerabilityReport r;
      r.id = parse_vul(field(row, "id"));
      r.label = parse_label(field(row, "label"));
      r.trials = field(row, "trials").get<int>();
      r.defense_success_pct = field(row, "defense_success_pct").get<double>();
      r.mean_impact = field(row, "mean_impact").get<double>();
      for (const auto& v : field(row, "vectors")) r.vectors.push_back(v.get<std::string>());
      report.vulnerabilities.push_back(std::move(r));
    }
    if (report.vulnerabilities.size() != taxonomy::all_vulnerabilities().size())
      throw ReportParseError("vulnerability list incomplete");

    const json& matrix = field(doc, "matrix");
    expect_keys(matrix, {"entries", "protocol", "provenance"}, "matrix");
    report.matrix.protocol = field(matrix, "protocol").get<std::string>();
    auto provenance = field(matrix, "provenance").get<std::string>();
    if (provenance == "Empirical")
      report.matrix.provenance = taxonomy::Provenance::Empirical;
    else if (provenance == "Literature")
      report.matrix.provenance = taxonomy::Provenance::Literature;
    else
      throw ReportParseError("unknown provenance: " + provenance);
    for (const auto& [key, value] : field(matrix, "entries").items()) {
      auto id = taxonomy::vulnerability_from_string(key);
      if (!id) throw ReportParseError("unknown vulnerability: " + key);
      report.matrix.entries[*id] = parse_label(value);
    }
    if (!report.matrix.complete()) throw ReportParseError("matrix incomplete");

    const json& exposure = field(doc, "exposure");
    expect_keys(exposure, {"confirmed", "partial", "score"}, "exposure");
    report.exposure.confirmed = field(exposure, "confirmed").get<int>();
    report.exposure.partial = field(exposure, "partial").get<int>();
    report.exposure.score = field(exposure, "score").get<double>();

    for (const auto& [key, value] : field(doc, "domains").items()) {
      auto domain = taxonomy::domain_from_string(key);
      if (!domain) throw ReportParseError("unknown domain: " + key);
      expect_keys(value, {"na", "value"}, "domain score");
      taxonomy::DomainScore score;
      score.not_applicable = field(value, "na").get<bool>();
      score.value = field(value, "value").get<double>();
      report.domains[*domain] = score;
    }
    if (report.domains.size() != taxonomy::all_domains().size())
      throw ReportParseError("domain list incomplete");
    return report;
  } catch (const json::exception& e) {
    throw ReportParseError(std::string("malformed report: ") + e.what());
  }
}

LiteratureProfile load_profile(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ReportParseError(std::string("invalid JSON: ") + e.what());
  }
  LiteratureProfile profile;
  try {
    expect_keys(doc, {"citation", "entries", "protocol"}, "profile");
    profile.protocol_name = field(doc, "protocol").get<std::string>();
    profile.citation = field(doc, "citation").get<std::string>();
    for (const auto& [key, value] : field(doc, "entries").items()) {
      auto id = taxonomy::vulnerability_from_string(key);
      if (!id) throw ReportParseError("unknown vulnerability: " + key);
      profile.entries[*id] = parse_label(value);
    }
  } catch (const json::exception& e) {
    throw ReportParseError(std::string("malformed profile: ") + e.what());
  }
  std::string missing;
  for (auto id : taxonomy::all_vulnerabilities())
    if (!profile.entries.count(id)) missing += (missing.empty() ? "" : ", ") +
                                               taxonomy::to_string(id);
  if (!missing.empty()) throw IncompleteProfile("profile missing entries: " + missing);
  return profile;
}

taxonomy::ProtocolMatrix to_matrix(const LiteratureProfile& profile) {
  taxonomy::ProtocolMatrix m;
  m.protocol = profile.protocol_name;
  m.provenance = taxonomy::Provenance::Literature;
  m.entries = profile.entries;
  return m;
}

}  // namespace agentsec::bench
