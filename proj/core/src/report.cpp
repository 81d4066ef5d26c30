#include "ioshock/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "ioshock/error.hpp"
#include "numfmt.hpp"

namespace ioshock {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kNominalDecimals = 0;
constexpr int kFractionDecimals = 6;
constexpr int kCoefficientDecimals = 5;

double as_number(const std::string& text) {
  double v = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), v);
  return v;
}

double round_nominal(double v) { return as_number(format_nominal(v)); }
double round_fraction(double v) { return as_number(format_fraction(v)); }
double round_coefficient(double v) { return as_number(format_coefficient(v)); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string> header) { row(header); }
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  template <typename Range>
  void row(const Range& cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) text_ += ',';
      text_ += csv_escape(c);
      first = false;
    }
    text_ += '\n';
  }
  void row(std::initializer_list<std::string> cells) { row<std::initializer_list<std::string>>(cells); }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct Writer {
  fs::path dir;
  std::set<ReportFormat> formats;
  std::vector<ManifestEntry> manifest;

  void emit(const std::string& name, const std::string& contents) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write report file " + path.string());
    out << contents;
    out.close();
    if (!out) throw Error("failed writing report file " + path.string());
    manifest.push_back({path, sha256_hex(contents), contents.size()});
  }

  void csv(const std::string& stem, const CsvWriter& w) {
    if (formats.count(ReportFormat::csv)) emit(stem + ".csv", w.text());
  }
  void json(const std::string& stem, const ordered_json& j) {
    if (formats.count(ReportFormat::json)) emit(stem + ".json", j.dump(2) + "\n");
  }
};

std::string kind_column(SatelliteKind k, const char* suffix) {
  return std::string(satellite_name(k)) + suffix;
}

std::string format_satellite(SatelliteKind, double v) { return format_nominal(v); }

void write_validation(Writer& w, const std::vector<Sector>& sectors, const ValidationReport& v) {
  auto code = [&](std::size_t i) { return i < sectors.size() ? sectors[i].code : std::to_string(i); };
  CsvWriter csv({"kind", "sector_code", "column_code", "expected", "actual", "rel_error", "message"});
  ordered_json j;
  j["rel_tol"] = v.rel_tol;
  j["passed"] = v.passed;
  j["violations"] = ordered_json::array();
  for (const auto& x : v.violations) {
    csv.row({std::string(violation_name(x.kind)), code(x.sector), code(x.column),
             format_fraction(x.expected), format_fraction(x.actual), format_fraction(x.rel_error),
             ""});
    j["violations"].push_back({{"kind", violation_name(x.kind)},
                               {"sector_code", code(x.sector)},
                               {"column_code", code(x.column)},
                               {"expected", round_fraction(x.expected)},
                               {"actual", round_fraction(x.actual)},
                               {"rel_error", round_fraction(x.rel_error)}});
  }
  j["warnings"] = ordered_json::array();
  for (const auto& x : v.warnings) {
    csv.row({std::string("warning"), code(x.sector), std::string(), std::string(), std::string(),
             std::string(), x.message});
    j["warnings"].push_back({{"sector_code", code(x.sector)}, {"message", x.message}});
  }
  w.csv("validation", csv);
  w.json("validation", j);
}

void write_multipliers(Writer& w, const MultiplierTable& m) {
  std::vector<std::string> header{"sector_code", "sector_name", "value", "rank"};
  for (const auto& [kind, values] : m.satellite) header.push_back(kind_column(kind, "_multiplier"));
  CsvWriter csv(header);
  ordered_json rows = ordered_json::array();
  for (const auto& r : rank_sectors(m.sectors, m.output, m.sectors.size())) {
    const auto i = static_cast<Eigen::Index>(r.sector.index);
    std::vector<std::string> cells{r.sector.code, r.sector.name, format_coefficient(r.value),
                                   std::to_string(r.rank)};
    ordered_json row{{"sector_code", r.sector.code},
                     {"sector_name", r.sector.name},
                     {"rank", r.rank},
                     {"output", round_coefficient(r.value)}};
    for (const auto& [kind, values] : m.satellite) {
      cells.push_back(format_coefficient(values(i)));
      row[std::string(satellite_name(kind))] = round_coefficient(values(i));
    }
    csv.row(cells);
    rows.push_back(std::move(row));
  }
  w.csv("multipliers", csv);
  w.json("multipliers", ordered_json{{"multipliers", rows}});
}

void write_ranking(Writer& w, const std::string& stem, const std::vector<RankedSector>& ranking) {
  CsvWriter csv({"sector_code", "sector_name", "value", "rank"});
  ordered_json rows = ordered_json::array();
  for (const auto& r : ranking) {
    csv.row({r.sector.code, r.sector.name, format_coefficient(r.value), std::to_string(r.rank)});
    rows.push_back({{"sector_code", r.sector.code},
                    {"sector_name", r.sector.name},
                    {"value", round_coefficient(r.value)},
                    {"rank", r.rank}});
  }
  w.csv(stem, csv);
  w.json(stem, ordered_json{{stem, rows}});
}

void write_profile(Writer& w, const SectorProfile& p) {
  write_ranking(w, "input_recipe", p.input_recipe);
  write_ranking(w, "downstream", p.downstream);

  CsvWriter csv({"metric", "value"});
  ordered_json j{{"sector_code", p.sector.code}, {"sector_name", p.sector.name}};
  csv.row({std::string("output_multiplier"), format_coefficient(p.output_multiplier)});
  j["output_multiplier"] = round_coefficient(p.output_multiplier);
  for (const auto& [kind, value] : p.satellite_multipliers) {
    csv.row({kind_column(kind, "_multiplier"), format_coefficient(value)});
    j[kind_column(kind, "_multiplier")] = round_coefficient(value);
  }
  csv.row({std::string("import_share"), format_coefficient(p.import_share)});
  csv.row({std::string("rank_from_lowest"), std::to_string(p.rank_from_lowest)});
  j["import_share"] = round_coefficient(p.import_share);
  j["rank_from_lowest"] = p.rank_from_lowest;
  w.csv("sector_multipliers", csv);
  w.json("sector_multipliers", j);
}

std::vector<RankedSector> rank_losses(const ImpactResult& r, std::size_t k) {
  return rank_sectors(r.sectors, r.q, k, RankOrder::ascending);
}

ordered_json aggregates_json(const ImpactResult& r) {
  ordered_json a{{"output_change", round_nominal(r.aggregates.output_change)},
                 {"output_change_fraction", round_fraction(r.aggregates.output_change_fraction)},
                 {"total_output", round_nominal(r.aggregates.total_output)}};
  for (const auto& [kind, total] : r.aggregates.satellite_change) {
    a[kind_column(kind, "_change")] = round_nominal(total);
  }
  return a;
}

void write_impact(Writer& w, const ImpactResult& r) {
  const std::string method(method_name(r.method));
  std::vector<std::string> header{"sector_code", "sector_name", "value", "rank", "output_change"};
  for (const auto& [kind, delta] : r.satellites) header.push_back(kind_column(kind, "_change"));
  CsvWriter csv(header);
  const auto ranking = rank_losses(r, r.sectors.size());
  std::vector<std::size_t> rank_of(r.sectors.size());
  for (const auto& e : ranking) {
    const auto i = static_cast<Eigen::Index>(e.sector.index);
    rank_of[e.sector.index] = e.rank;
    std::vector<std::string> cells{e.sector.code, e.sector.name, format_fraction(e.value),
                                   std::to_string(e.rank), format_nominal(r.dx(i))};
    for (const auto& [kind, delta] : r.satellites) cells.push_back(format_satellite(kind, delta(i)));
    csv.row(cells);
  }
  w.csv("impact_" + method, csv);

  CsvWriter summary({"metric", "value"});
  summary.row({std::string("output_change"), format_nominal(r.aggregates.output_change)});
  summary.row({std::string("output_change_fraction"),
               format_fraction(r.aggregates.output_change_fraction)});
  summary.row({std::string("total_output"), format_nominal(r.aggregates.total_output)});
  for (const auto& [kind, total] : r.aggregates.satellite_change) {
    summary.row({kind_column(kind, "_change"), format_nominal(total)});
  }
  summary.row({std::string("blowup_applied"), format_fraction(r.blowup_applied)});
  w.csv("summary_" + method, summary);

  ordered_json sectors = ordered_json::array();
  for (std::size_t s = 0; s < r.sectors.size(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    ordered_json row{{"sector_code", r.sectors[s].code},
                     {"sector_name", r.sectors[s].name},
                     {"rank", rank_of[s]},
                     {"baseline", round_nominal(r.baseline(i))},
                     {"q", round_fraction(r.q(i))},
                     {"output_change", round_nominal(r.dx(i))}};
    for (const auto& [kind, delta] : r.satellites) {
      row[kind_column(kind, "_change")] = round_nominal(delta(i));
    }
    sectors.push_back(std::move(row));
  }
  w.json("impact_" + method, ordered_json{{"method", method},
                                          {"scenario", r.scenario},
                                          {"blowup_applied", round_fraction(r.blowup_applied)},
                                          {"aggregates", aggregates_json(r)},
                                          {"sectors", sectors}});
}

std::string format_metric(const std::string& metric, double v) {
  return metric == "output_change_fraction" ? format_fraction(v) : format_nominal(v);
}

double round_metric(const std::string& metric, double v) {
  return metric == "output_change_fraction" ? round_fraction(v) : round_nominal(v);
}

void write_comparison(Writer& w, const ComparisonReport& c) {
  const std::string a(method_name(c.method_a));
  const std::string b(method_name(c.method_b));
  CsvWriter csv({"metric", a, b, "difference"});
  ordered_json aggregates = ordered_json::array();
  for (const auto& d : c.aggregates) {
    csv.row({d.metric, format_metric(d.metric, d.a), format_metric(d.metric, d.b),
             format_metric(d.metric, d.difference)});
    aggregates.push_back({{"metric", d.metric},
                          {a, round_metric(d.metric, d.a)},
                          {b, round_metric(d.metric, d.b)},
                          {"difference", round_metric(d.metric, d.difference)}});
  }
  w.csv("comparison", csv);

  CsvWriter sectors({"sector_code", "sector_name", "value", "rank", "output_change_difference"});
  ordered_json rows = ordered_json::array();
  for (const auto& e : rank_sectors(c.sectors, c.q_difference, c.sectors.size())) {
    const auto i = static_cast<Eigen::Index>(e.sector.index);
    sectors.row({e.sector.code, e.sector.name, format_fraction(e.value), std::to_string(e.rank),
                 format_nominal(c.dx_difference(i))});
    rows.push_back({{"sector_code", e.sector.code},
                    {"sector_name", e.sector.name},
                    {"q_difference", round_fraction(e.value)},
                    {"rank", e.rank},
                    {"output_change_difference", round_nominal(c.dx_difference(i))}});
  }
  w.csv("comparison_sectors", sectors);

  ordered_json overlap = ordered_json::array();
  for (const auto& s : c.top_overlap) overlap.push_back(s.code);
  w.json("comparison", ordered_json{{"scenario", c.scenario},
                                    {"method_a", a},
                                    {"method_b", b},
                                    {"aggregates", aggregates},
                                    {"top_k", c.top_k},
                                    {"top_overlap", overlap},
                                    {"sectors", rows}});
}

void write_plot_data(Writer& w, const ReportBundle& bundle) {
  const std::string stem = "plotdata_top" + std::to_string(bundle.top_k);
  CsvWriter csv({"series", "sector_code", "sector_name", "value", "rank"});
  ordered_json series = ordered_json::object();
  auto add = [&](const std::string& name, const std::vector<RankedSector>& points, bool fraction) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : points) {
      const std::string v = fraction ? format_fraction(p.value) : format_coefficient(p.value);
      csv.row({name, p.sector.code, p.sector.name, v, std::to_string(p.rank)});
      pts.push_back({{"sector_code", p.sector.code},
                     {"sector_name", p.sector.name},
                     {"value", as_number(v)},
                     {"rank", p.rank}});
    }
    series[name] = std::move(pts);
  };
  if (bundle.multipliers) {
    add("output_multiplier",
        rank_sectors(bundle.multipliers->sectors, bundle.multipliers->output, bundle.top_k), false);
  }
  for (const auto& r : bundle.impacts) {
    add("q_" + std::string(method_name(r.method)), rank_losses(r, bundle.top_k), true);
  }
  w.csv(stem, csv);
  w.json(stem, series);
}

}  // namespace

std::string format_nominal(double v) { return detail::format_fixed(v, kNominalDecimals); }
std::string format_fraction(double v) { return detail::format_fixed(v, kFractionDecimals); }
std::string format_coefficient(double v) { return detail::format_fixed(v, kCoefficientDecimals); }

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  return std::nullopt;
}

MultiplierTable compute_multipliers(const LeontiefModel& model) {
  MultiplierTable m{model.table().sectors(), output_multipliers(model), {}};
  for (const auto& [kind, coeff] : model.coeffs().satellite_coefficients) {
    m.satellite.emplace(kind, satellite_multipliers(model, kind));
  }
  return m;
}

SectorProfile sector_profile(const LeontiefModel& model, std::size_t sector, std::size_t top_k) {
  if (sector >= model.size()) throw StructuralError("unknown sector index " + std::to_string(sector));
  SectorProfile p;
  p.sector = model.table().sector(sector);
  p.input_recipe = input_recipe(model, sector, top_k);
  p.downstream = downstream_importance(model, sector, top_k);
  const Eigen::VectorXd m = output_multipliers(model);
  const auto si = static_cast<Eigen::Index>(sector);
  p.output_multiplier = m(si);
  for (const auto& [kind, coeff] : model.coeffs().satellite_coefficients) {
    p.satellite_multipliers[kind] = satellite_multipliers(model, kind)(si);
  }
  p.import_share = import_share(model.coeffs(), sector);
  for (const auto& r : rank_sectors(model.table().sectors(), m, model.size(), RankOrder::ascending)) {
    if (r.sector.index == sector) p.rank_from_lowest = r.rank;
  }
  return p;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0x0f];
  }
  return out;
}

std::vector<ManifestEntry> write_reports(const ReportBundle& bundle, const fs::path& out_dir,
                                         const std::set<ReportFormat>& formats) {
  if (formats.empty()) throw ConfigError("no report format selected");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error("cannot create output directory " + out_dir.string());
  }

  Writer w{out_dir, formats, {}};
  if (bundle.validation) write_validation(w, bundle.sectors, *bundle.validation);
  if (bundle.multipliers) write_multipliers(w, *bundle.multipliers);
  if (bundle.profile) write_profile(w, *bundle.profile);
  for (const auto& r : bundle.impacts) write_impact(w, r);
  if (bundle.comparison) write_comparison(w, *bundle.comparison);
  if (bundle.multipliers || !bundle.impacts.empty()) write_plot_data(w, bundle);

  ordered_json files = ordered_json::array();
  for (const auto& e : w.manifest) {
    files.push_back({{"path", e.path.filename().string()}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  }
  const std::string text = ordered_json{{"files", files}}.dump(2) + "\n";
  std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write manifest in " + out_dir.string());
  out << text;
  return w.manifest;
}

ImpactResult read_impact_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string(), 0, e.byte, e.what());
  }
  try {
    ImpactResult r;
    const auto method = j.at("method").get<std::string>();
    if (method == "inoperability") {
      r.method = Method::inoperability;
    } else if (method == "extraction") {
      r.method = Method::extraction;
    } else if (method == "full_extraction") {
      r.method = Method::full_extraction;
    } else {
      throw ParseError(path.string(), 0, 0, "unknown method '" + method + "'");
    }
    r.scenario = j.at("scenario").get<std::string>();
    r.blowup_applied = j.at("blowup_applied").get<double>();
    const auto& rows = j.at("sectors");
    const auto n = static_cast<Eigen::Index>(rows.size());
    r.baseline.resize(n);
    r.q.resize(n);
    r.dx.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      r.sectors.push_back({row.at("sector_code").get<std::string>(),
                           row.at("sector_name").get<std::string>(), static_cast<std::size_t>(i)});
      r.baseline(i) = row.at("baseline").get<double>();
      r.q(i) = row.at("q").get<double>();
      r.dx(i) = row.at("output_change").get<double>();
      for (auto kind : kSatelliteKinds) {
        const auto key = kind_column(kind, "_change");
        if (!row.contains(key)) continue;
        auto [it, inserted] = r.satellites.try_emplace(kind, Eigen::VectorXd::Zero(n));
        it->second(i) = row.at(key).get<double>();
      }
    }
    const auto& a = j.at("aggregates");
    r.aggregates.output_change = a.at("output_change").get<double>();
    r.aggregates.output_change_fraction = a.at("output_change_fraction").get<double>();
    r.aggregates.total_output = a.at("total_output").get<double>();
    for (auto kind : kSatelliteKinds) {
      const auto key = kind_column(kind, "_change");
      if (a.contains(key)) r.aggregates.satellite_change[kind] = a.at(key).get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, 0, e.what());
  }
}

}  // namespace ioshock
