#include "ioshock_cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "ioshock/error.hpp"
#include "ioshock/ingest.hpp"
#include "ioshock/leontief.hpp"
#include "ioshock/report.hpp"
#include "ioshock/scenario.hpp"
#include "ioshock/shock_analysis.hpp"

namespace ioshock::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutDirEnv = "IOSHOCK_OUT_DIR";
constexpr const char* kDefaultOutDir = "ioshock_out";

struct Config {
  std::string table;
  std::string meta;
  std::vector<std::string> satellites;
  std::vector<std::string> scenarios;
  std::vector<std::string> impacts;
  std::string method = "both";
  std::optional<double> blowup;
  std::string blowup_history;
  std::string out;
  std::vector<std::string> formats{"csv", "json"};
  double rel_tol = kIngestedRelTol;
  std::size_t top_k = 10;
  unsigned jobs = 1;
  std::string sector;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " path is required");
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " not found: " + path);
}

void check_table_paths(const Config& cfg) {
  require_file(cfg.table, "table");
  require_file(cfg.meta, "sector metadata");
  for (const auto& s : cfg.satellites) require_file(s, "satellite file");
}

std::set<ReportFormat> report_formats(const Config& cfg) {
  std::set<ReportFormat> out;
  for (const auto& f : cfg.formats) {
    auto parsed = parse_report_format(f);
    if (!parsed) throw ConfigError("unknown report format '" + f + "'");
    out.insert(*parsed);
  }
  if (out.empty()) throw ConfigError("no report format selected");
  return out;
}

fs::path out_dir(const Config& cfg) {
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kDefaultOutDir;
}

IOTable load_table(const Config& cfg, std::ostream& err) {
  std::vector<fs::path> sats(cfg.satellites.begin(), cfg.satellites.end());
  DropResult dropped = drop_zero_sectors(parse_io_table(cfg.table, cfg.meta, sats));
  for (const auto& s : dropped.dropped) {
    err << "note: dropped zero-output sector " << s.code << " (" << s.name << ")\n";
  }
  return std::move(dropped.table);
}

void print_validation(const ValidationReport& v, const std::vector<Sector>& sectors,
                      std::ostream& out) {
  out << "validation " << (v.passed ? "passed" : "failed") << ": " << v.violations.size()
      << " violation(s), " << v.warnings.size() << " warning(s), rel_tol " << v.rel_tol << "\n";
  for (const auto& x : v.violations) {
    out << "  " << violation_name(x.kind) << " " << sectors.at(x.sector).code << " expected "
        << format_fraction(x.expected) << " actual " << format_fraction(x.actual)
        << " rel_error " << format_fraction(x.rel_error) << "\n";
  }
  for (const auto& w : v.warnings) {
    out << "  warning " << sectors.at(w.sector).code << ": " << w.message << "\n";
  }
}

void print_manifest(const std::vector<ManifestEntry>& files, std::ostream& out) {
  for (const auto& f : files) out << "  wrote " << f.path.string() << "\n";
}

void print_impact(const ImpactResult& r, std::ostream& out) {
  out << "  " << method_name(r.method) << ": output_change "
      << format_nominal(r.aggregates.output_change) << " ("
      << format_fraction(r.aggregates.output_change_fraction) << " of total output "
      << format_nominal(r.aggregates.total_output) << ")";
  for (const auto& [kind, total] : r.aggregates.satellite_change) {
    out << ", " << satellite_name(kind) << "_change " << format_nominal(total);
  }
  out << ", blowup " << format_fraction(r.blowup_applied) << "\n";
  for (const auto& e : rank_sectors(r.sectors, r.q, 3, RankOrder::ascending, true)) {
    out << "    " << e.rank << ". " << e.sector.code << " q " << format_fraction(e.value) << "\n";
  }
}

void print_comparison(const ComparisonReport& c, std::ostream& out) {
  out << "  comparison " << method_name(c.method_a) << " - " << method_name(c.method_b) << ":";
  for (const auto& d : c.aggregates) {
    out << " " << d.metric << " "
        << (d.metric == "output_change_fraction" ? format_fraction(d.difference)
                                                 : format_nominal(d.difference));
  }
  out << "\n";
}

struct TableModel {
  IOTable table;
  ValidationReport validation;
};

// Shared prologue of multipliers and run: parse, validate, and stop with exit
// 1 (validation report written) when identities fail.
std::optional<TableModel> validated_table(const Config& cfg, const std::set<ReportFormat>& formats,
                                          std::ostream& out, std::ostream& err) {
  IOTable table = load_table(cfg, err);
  ValidationReport v = validate_table(table, cfg.rel_tol);
  if (!v.passed) {
    print_validation(v, table.sectors(), out);
    ReportBundle bundle;
    bundle.sectors = table.sectors();
    bundle.validation = v;
    write_reports(bundle, out_dir(cfg), formats);
    err << "error: table fails its accounting identities\n";
    return std::nullopt;
  }
  return TableModel{std::move(table), std::move(v)};
}

int cmd_validate(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_table_paths(cfg);
  const auto formats = report_formats(cfg);
  IOTable table = load_table(cfg, err);
  ReportBundle bundle;
  bundle.sectors = table.sectors();
  bundle.validation = validate_table(table, cfg.rel_tol);
  print_validation(*bundle.validation, table.sectors(), out);
  print_manifest(write_reports(bundle, out_dir(cfg), formats), out);
  return bundle.validation->passed ? kOk : kIdentityViolation;
}

int cmd_multipliers(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_table_paths(cfg);
  const auto formats = report_formats(cfg);
  auto tm = validated_table(cfg, formats, out, err);
  if (!tm) return kIdentityViolation;
  const LeontiefModel model = LeontiefModel::build(std::move(tm->table));

  ReportBundle bundle;
  bundle.sectors = model.table().sectors();
  bundle.top_k = cfg.top_k;
  bundle.multipliers = compute_multipliers(model);
  if (!cfg.sector.empty()) {
    bundle.profile = sector_profile(model, model.table().index_of(cfg.sector), cfg.top_k);
  }

  out << "output multipliers (top " << cfg.top_k << " of " << model.size() << ")\n";
  for (const auto& r : rank_sectors(bundle.sectors, bundle.multipliers->output, cfg.top_k)) {
    out << "  " << r.rank << ". " << r.sector.code << " " << format_coefficient(r.value) << "\n";
  }
  if (bundle.profile) {
    const auto& p = *bundle.profile;
    out << "sector " << p.sector.code << ": output multiplier "
        << format_coefficient(p.output_multiplier) << ", rank " << p.rank_from_lowest
        << " lowest of " << model.size() << ", import share " << format_coefficient(p.import_share)
        << "\n";
    for (const auto& [kind, value] : p.satellite_multipliers) {
      out << "  " << satellite_name(kind) << " multiplier " << format_coefficient(value) << "\n";
    }
    out << "  input recipe:";
    for (const auto& r : p.input_recipe) {
      out << " " << r.sector.code << " " << format_coefficient(r.value);
    }
    out << "\n  downstream:";
    for (const auto& r : p.downstream) {
      out << " " << r.sector.code << " " << format_coefficient(r.value);
    }
    out << "\n";
  }
  print_manifest(write_reports(bundle, out_dir(cfg), formats), out);
  return kOk;
}

struct ScenarioRun {
  std::string name;
  fs::path dir;
  ReportBundle bundle;
};

ScenarioRun run_scenario(const LeontiefModel& model, const ScenarioSpec& spec, const Config& cfg,
                         std::optional<double> blowup, const fs::path& dir) {
  const double b = blowup.value_or(spec.blowup_factor);
  const DemandDelta delta = build_demand_delta(model.table(), spec);

  ScenarioRun run{spec.name, dir, {}};
  run.bundle.sectors = model.table().sectors();
  run.bundle.top_k = cfg.top_k;
  run.bundle.multipliers = compute_multipliers(model);
  if (cfg.method == "inoperability" || cfg.method == "both") {
    run.bundle.impacts.push_back(apply_blowup(inoperability(model, delta, spec.name), b));
  }
  if (cfg.method == "extraction" || cfg.method == "both") {
    const auto ex = ExtractionSpec::from_scenario(model, spec, delta);
    run.bundle.impacts.push_back(apply_blowup(partial_extraction(model, ex, spec.name), b));
  }
  if (run.bundle.impacts.size() == 2) {
    run.bundle.comparison = compare_methods(run.bundle.impacts[0], run.bundle.impacts[1], cfg.top_k);
  }
  return run;
}

int cmd_run(const Config& cfg, std::ostream& out, std::ostream& err) {
  check_table_paths(cfg);
  if (cfg.scenarios.empty()) throw ConfigError("at least one --scenario is required");
  for (const auto& s : cfg.scenarios) require_file(s, "scenario");
  if (!cfg.blowup_history.empty()) require_file(cfg.blowup_history, "blowup history");
  if (cfg.blowup && cfg.blowup_history.size()) {
    throw ConfigError("--blowup and --blowup-history are mutually exclusive");
  }
  if (cfg.blowup && !(*cfg.blowup > 0.0)) throw ConfigError("--blowup must be positive");
  const auto formats = report_formats(cfg);

  std::vector<ScenarioSpec> specs;
  std::set<std::string> names;
  for (const auto& s : cfg.scenarios) {
    specs.push_back(parse_scenario(s));
    if (!names.insert(specs.back().name).second) {
      throw ConfigError("duplicate scenario name '" + specs.back().name + "'");
    }
  }
  std::optional<double> blowup = cfg.blowup;
  if (!cfg.blowup_history.empty()) {
    const auto history = parse_blowup_history(cfg.blowup_history);
    blowup = estimate_blowup_factor(history.final_demand, history.gdp_growth);
    out << "estimated blowup factor " << format_fraction(*blowup) << "\n";
  }

  auto tm = validated_table(cfg, formats, out, err);
  if (!tm) return kIdentityViolation;
  const LeontiefModel model = LeontiefModel::build(std::move(tm->table));

  const fs::path root = out_dir(cfg);
  auto dir_for = [&](const ScenarioSpec& s) { return specs.size() == 1 ? root : root / s.name; };

  // Scenarios are independent; results are collected and written in input
  // order so output does not depend on --jobs.
  std::vector<ScenarioRun> runs;
  const std::size_t jobs = std::max(1u, cfg.jobs);
  for (std::size_t start = 0; start < specs.size(); start += jobs) {
    std::vector<std::future<ScenarioRun>> batch;
    for (std::size_t i = start; i < std::min(specs.size(), start + jobs); ++i) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 run_scenario, std::cref(model), std::cref(specs[i]),
                                 std::cref(cfg), blowup, dir_for(specs[i])));
    }
    for (auto& f : batch) runs.push_back(f.get());
  }

  for (const auto& run : runs) {
    out << "scenario " << run.name << "\n";
    for (const auto& r : run.bundle.impacts) print_impact(r, out);
    if (run.bundle.comparison) print_comparison(*run.bundle.comparison, out);
    print_manifest(write_reports(run.bundle, run.dir, formats), out);
  }
  return kOk;
}

int cmd_compare(const Config& cfg, std::ostream& out, std::ostream&) {
  if (cfg.impacts.size() != 2) throw ConfigError("compare needs exactly two --impact files");
  for (const auto& p : cfg.impacts) require_file(p, "impact file");
  const auto formats = report_formats(cfg);
  const ImpactResult a = read_impact_json(cfg.impacts[0]);
  const ImpactResult b = read_impact_json(cfg.impacts[1]);
  ReportBundle bundle;
  bundle.sectors = a.sectors;
  bundle.top_k = cfg.top_k;
  bundle.comparison = compare_methods(a, b, cfg.top_k);
  out << "scenario " << bundle.comparison->scenario << "\n";
  print_comparison(*bundle.comparison, out);
  print_manifest(write_reports(bundle, out_dir(cfg), formats), out);
  return kOk;
}

void add_table_options(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--table", cfg.table, "IO table CSV")->required();
  cmd->add_option("--meta", cfg.meta, "sector metadata CSV (code,name)")->required();
  cmd->add_option("--satellites", cfg.satellites, "satellite account CSV (repeatable)");
  cmd->add_option("--rel-tol", cfg.rel_tol, "relative tolerance for accounting identities")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_output_options(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--out", cfg.out,
                  std::string("output directory (default $") + kOutDirEnv + " or " +
                      kDefaultOutDir + ")");
  cmd->add_option("--format", cfg.formats, "report formats: csv, json")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--top-k", cfg.top_k, "length of ranked listings")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Leontief input-output shock analysis", "ioshock"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "check accounting identities of a table");
  add_table_options(validate, cfg);
  add_output_options(validate, cfg);

  auto* multipliers = app.add_subcommand("multipliers", "output and satellite multipliers");
  add_table_options(multipliers, cfg);
  add_output_options(multipliers, cfg);
  multipliers->add_option("--sector", cfg.sector, "sector code for the linkage profile");

  auto* run_cmd = app.add_subcommand("run", "run scenarios through the impact methods");
  add_table_options(run_cmd, cfg);
  add_output_options(run_cmd, cfg);
  run_cmd->add_option("--scenario", cfg.scenarios, "scenario JSON (repeatable)")->required();
  run_cmd->add_option("--method", cfg.method, "inoperability, extraction or both")
      ->capture_default_str()
      ->check(CLI::IsMember({"inoperability", "extraction", "both"}));
  run_cmd->add_option("--blowup", cfg.blowup, "final-demand blowup factor (overrides scenario)");
  run_cmd->add_option("--blowup-history", cfg.blowup_history,
                      "JSON history used to estimate the blowup factor");
  run_cmd->add_option("--jobs", cfg.jobs, "scenarios run in parallel")
      ->capture_default_str()
      ->check(CLI::Range(1u, 256u));

  auto* compare = app.add_subcommand("compare", "compare two impact_<method>.json reports");
  add_output_options(compare, cfg);
  compare->add_option("--impact", cfg.impacts, "impact JSON file (give two)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(cfg, out, err);
    if (multipliers->parsed()) return cmd_multipliers(cfg, out, err);
    if (run_cmd->parsed()) return cmd_run(cfg, out, err);
    return cmd_compare(cfg, out, err);
  } catch (const NonProductiveError& e) {
    err << "error: non-productive economy: " << e.what() << "\n";
    return kNonProductive;
  } catch (const ConsistencyError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ioshock::cli
