#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "agentsec/attacks.hpp"
#include "agentsec/emit.hpp"
#include "agentsec/experiment.hpp"
#include "agentsec/taxonomy.hpp"

namespace agentsec::cli {
namespace {

using nlohmann::json;

// Input/configuration problems: reported as "error: ..." with exit code 2.
// Anything else that escapes a command is a SUT failure, exit code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw ConfigError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw ConfigError("cannot read " + path);
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.good()) throw ConfigError("cannot write " + path);
  out << content;
  out.flush();
  if (!out.good()) throw ConfigError("cannot write " + path);
}

void emit_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

// ----- run ---------------------------------------------------------------

struct RunFlags {
  std::string config_path;
  std::string sut;
  std::string posture;
  std::string backend;
  std::string out;
  int trials = 0;
  std::uint64_t seed = 0;
  int flood_count = 0;
  std::int64_t clock_origin_ms = 0;
  bool has_trials = false;
  bool has_seed = false;
  bool has_flood = false;
  bool has_clock = false;
  bool has_backend = false;
  bool has_out = false;
};

int require_int(const json& value, const std::string& key) {
  if (!value.is_number_integer() && !value.is_number_unsigned())
    throw ConfigError("config key " + key + " must be an integer");
  return value.get<int>();
}

// Applies a config-file document on top of `config`, mirroring the report's
// config block plus the extra "out" key. Unknown keys are rejected.
void apply_config_file(const json& doc, bench::ExperimentConfig& config,
                       std::string& out_path) {
  if (!doc.is_object()) throw ConfigError("config file is not a JSON object");
  static const std::vector<std::string> allowed = {
      "sut",     "posture",         "protocol",          "trials",
      "seed",    "flood_count",     "backend",           "clock_origin_ms",
      "vectors", "overrides",       "posture_dependent", "out"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key: " + key);
    (void)value;
  }
  // sut/posture were consumed before defaults were built; skip them here.
  if (doc.contains("protocol")) {
    if (!doc["protocol"].is_string() || doc["protocol"].get<std::string>().empty())
      throw ConfigError("config key protocol must be a non-empty string");
    config.protocol_name = doc["protocol"].get<std::string>();
  }
  if (doc.contains("trials")) config.trials = require_int(doc["trials"], "trials");
  if (doc.contains("seed")) {
    const auto& v = doc["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError("config key seed must be a non-negative integer");
    config.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("flood_count"))
    config.flood_count = require_int(doc["flood_count"], "flood_count");
  if (doc.contains("clock_origin_ms")) {
    const auto& v = doc["clock_origin_ms"];
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw ConfigError("config key clock_origin_ms must be an integer");
    config.clock_origin_ms = v.get<std::int64_t>();
  }
  if (doc.contains("backend")) {
    if (!doc["backend"].is_string()) throw ConfigError("config key backend must be a string");
    auto backend = bench::backend_from_string(doc["backend"].get<std::string>());
    if (!backend) throw ConfigError("unknown backend: " + doc["backend"].get<std::string>());
    config.backend = *backend;
  }
  if (doc.contains("vectors")) {
    if (!doc["vectors"].is_array()) throw ConfigError("config key vectors must be an array");
    config.vectors.clear();
    for (const auto& v : doc["vectors"]) {
      if (!v.is_string()) throw ConfigError("vector names must be strings");
      auto id = attacks::vector_from_string(v.get<std::string>());
      if (!id) throw ConfigError("unknown attack vector: " + v.get<std::string>());
      config.vectors.push_back(*id);
    }
  }
  if (doc.contains("overrides")) {
    if (!doc["overrides"].is_object())
      throw ConfigError("config key overrides must be an object");
    config.overrides.clear();
    for (const auto& [name, label] : doc["overrides"].items()) {
      auto id = taxonomy::vulnerability_from_string(name);
      if (!id) throw ConfigError("unknown vulnerability in overrides: " + name);
      if (!label.is_string()) throw ConfigError("override labels must be strings");
      auto parsed = taxonomy::label_from_string(label.get<std::string>());
      if (!parsed)
        throw ConfigError("unknown label in overrides: " + label.get<std::string>());
      config.overrides[*id] = *parsed;
    }
  }
  if (doc.contains("posture_dependent")) {
    if (!doc["posture_dependent"].is_array())
      throw ConfigError("config key posture_dependent must be an array");
    config.posture_dependent.clear();
    for (const auto& v : doc["posture_dependent"]) {
      if (!v.is_string()) throw ConfigError("posture_dependent names must be strings");
      auto id = taxonomy::vulnerability_from_string(v.get<std::string>());
      if (!id)
        throw ConfigError("unknown vulnerability in posture_dependent: " +
                          v.get<std::string>());
      config.posture_dependent.insert(*id);
    }
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("config key out must be a string");
    out_path = doc["out"].get<std::string>();
  }
}

json parse_json(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ConfigError(what + " is not valid JSON");
  return doc;
}

int cmd_run(const RunFlags& flags) {
  json doc = json::object();
  if (!flags.config_path.empty())
    doc = parse_json(read_file(flags.config_path), "config file " + flags.config_path);
  if (!doc.is_object()) throw ConfigError("config file is not a JSON object");

  // sut and posture select the defaults everything else layers onto.
  std::string sut_name = flags.sut;
  if (sut_name.empty() && doc.contains("sut")) {
    if (!doc["sut"].is_string()) throw ConfigError("config key sut must be a string");
    sut_name = doc["sut"].get<std::string>();
  }
  if (sut_name.empty()) throw ConfigError("--sut is required (or a config file with one)");
  auto sut = attacks::sut_from_string(sut_name);
  if (!sut) throw ConfigError("unknown sut: " + sut_name);

  std::string posture = flags.posture;
  if (posture.empty() && doc.contains("posture")) {
    if (!doc["posture"].is_string()) throw ConfigError("config key posture must be a string");
    posture = doc["posture"].get<std::string>();
  }
  if (posture.empty())
    throw ConfigError("--posture is required (or a config file with one)");
  if (!bench::valid_posture(*sut, posture))
    throw ConfigError("unknown posture for " + attacks::to_string(*sut) + ": " + posture);

  auto config = bench::default_config(*sut, posture);
  std::string out_path;
  apply_config_file(doc, config, out_path);

  if (flags.has_trials) config.trials = flags.trials;
  if (flags.has_seed) config.seed = flags.seed;
  if (flags.has_flood) config.flood_count = flags.flood_count;
  if (flags.has_clock) config.clock_origin_ms = flags.clock_origin_ms;
  if (flags.has_backend) {
    auto backend = bench::backend_from_string(flags.backend);
    if (!backend) throw ConfigError("unknown backend: " + flags.backend);
    config.backend = *backend;
  }
  if (flags.has_out) out_path = flags.out;

  auto report = bench::run_experiment(config);
  emit_output(out_path, bench::serialize_report(report));
  return 0;
}

// ----- emission commands -------------------------------------------------

taxonomy::ProtocolMatrix load_report_matrix(const std::string& path) {
  try {
    return bench::parse_report(read_file(path)).matrix;
  } catch (const bench::ReportParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

taxonomy::ProtocolMatrix load_profile_matrix(const std::string& path) {
  try {
    return bench::to_matrix(bench::load_profile(read_file(path)));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<taxonomy::ProtocolMatrix> collect_columns(
    const std::string& profile_path, const std::vector<std::string>& inputs) {
  std::vector<taxonomy::ProtocolMatrix> columns;
  if (!profile_path.empty()) columns.push_back(load_profile_matrix(profile_path));
  for (const auto& path : inputs) columns.push_back(load_report_matrix(path));
  if (columns.empty()) throw ConfigError("no input columns: pass --inputs or --profile");
  return columns;
}

int cmd_matrix(const std::string& profile_path, const std::vector<std::string>& inputs,
               const std::string& format, const std::string& out_path) {
  auto doc = bench::emit_vsm(collect_columns(profile_path, inputs));
  emit_output(out_path, format == "csv" ? doc.csv : doc.markdown);
  return 0;
}

int cmd_radar(const std::string& input, const std::string& out_path,
              const std::string& svg_path) {
  auto matrix = load_report_matrix(input);
  emit_output(out_path, bench::emit_radar_csv(matrix));
  if (!svg_path.empty()) write_file(svg_path, bench::emit_radar_svg({matrix}));
  return 0;
}

int cmd_summary(const std::string& profile_path, const std::vector<std::string>& inputs,
                const std::string& paper_counts_path, const std::string& out_path) {
  auto columns = collect_columns(profile_path, inputs);
  std::map<std::string, bench::PaperCounts> published;
  if (!paper_counts_path.empty()) {
    try {
      published = bench::load_paper_counts(read_file(paper_counts_path));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(paper_counts_path + ": " + e.what());
    }
  }
  emit_output(out_path, bench::emit_summary(columns, published));
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"agentsec: desk-scale security laboratory for agent protocols"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run an experiment and write its report");
  run->add_option("--config", run_flags.config_path,
                  "JSON config file (flags override its values)");
  run->add_option("--sut", run_flags.sut, "System under test: coral or acp");
  run->add_option("--posture", run_flags.posture,
                  "coral: as-published|hardened; acp: none|partial|strict");
  auto* trials_opt = run->add_option("--trials", run_flags.trials, "Trials per vector");
  auto* seed_opt = run->add_option("--seed", run_flags.seed, "Root RNG seed");
  auto* flood_opt =
      run->add_option("--flood-count", run_flags.flood_count, "Flood vector volume");
  auto* clock_opt = run->add_option("--clock-origin-ms", run_flags.clock_origin_ms,
                                    "Synthetic clock origin (ms)");
  auto* backend_opt = run->add_option("--backend", run_flags.backend,
                                      "Transport backend: in-process or loopback");
  auto* out_opt =
      run->add_option("--out", run_flags.out, "Report output path (default: stdout)");

  std::string m_profile, m_format = "md", m_out;
  std::vector<std::string> m_inputs;
  auto* matrix = app.add_subcommand("matrix", "Emit the comparative status matrix");
  matrix->add_option("--inputs", m_inputs, "Report files, one column each (in order)");
  matrix->add_option("--profile", m_profile, "Literature profile JSON (first column)");
  matrix->add_option("--format", m_format, "Output format: md or csv")
      ->check(CLI::IsMember({"md", "csv"}));
  matrix->add_option("--out", m_out, "Output path (default: stdout)");

  std::string r_input, r_out, r_svg;
  auto* radar = app.add_subcommand("radar", "Emit per-domain radar data for one report");
  radar->add_option("--input", r_input, "Report file")->required();
  radar->add_option("--out", r_out, "CSV output path (default: stdout)");
  radar->add_option("--svg", r_svg, "Also write a standalone SVG to this path");

  std::string s_profile, s_counts, s_out;
  std::vector<std::string> s_inputs;
  auto* summary = app.add_subcommand("summary", "Emit the per-protocol exposure summary");
  summary->add_option("--inputs", s_inputs, "Report files, one row each (in order)");
  summary->add_option("--profile", s_profile, "Literature profile JSON (first row)");
  summary->add_option("--paper-counts", s_counts,
                      "Published counts fixture; adds comparison columns");
  summary->add_option("--out", s_out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    auto parsed = app.get_subcommands();
    std::cout << (parsed.empty() ? app.help() : parsed.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  run_flags.has_trials = trials_opt->count() > 0;
  run_flags.has_seed = seed_opt->count() > 0;
  run_flags.has_flood = flood_opt->count() > 0;
  run_flags.has_clock = clock_opt->count() > 0;
  run_flags.has_backend = backend_opt->count() > 0;
  run_flags.has_out = out_opt->count() > 0;

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (matrix->parsed()) return cmd_matrix(m_profile, m_inputs, m_format, m_out);
    if (radar->parsed()) return cmd_radar(r_input, r_out, r_svg);
    if (summary->parsed()) return cmd_summary(s_profile, s_inputs, s_counts, s_out);
    std::cerr << "error: no command given\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace agentsec::cli
