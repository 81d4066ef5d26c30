#include "ioshock/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ioshock/error.hpp"
#include "numfmt.hpp"

namespace ioshock {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kTotalOutput = "total_output";
constexpr std::array<std::string_view, 3> kTrailingRows{"IMPORTS", "VALUE_ADDED", "TOTAL_USES"};
constexpr double kTotalUsesTol = 1e-9;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

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

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

struct SectorMeta {
  std::vector<std::string> codes;
  std::map<std::string, std::string> names;
};

SectorMeta parse_metadata(const fs::path& path) {
  const auto rows = read_csv(path);
  const std::string file = path.string();
  if (rows.empty()) throw ParseError(file, 1, 1, "empty sector metadata file");
  const auto& header = rows.front();
  if (header.cells.size() < 2 || trim(header.cells[0]) != "code" || trim(header.cells[1]) != "name") {
    throw ParseError(file, header.line, 1, "expected header 'code,name'");
  }
  SectorMeta meta;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != 2) {
      throw ParseError(file, row.line, row.cells.size(), "expected 2 cells, found " +
                                                             std::to_string(row.cells.size()));
    }
    std::string code(trim(row.cells[0]));
    if (code.empty()) throw ParseError(file, row.line, 1, "empty sector code");
    if (!meta.names.emplace(code, std::string(trim(row.cells[1]))).second) {
      throw ParseError(file, row.line, 1, "duplicate sector '" + code + "'");
    }
    meta.codes.push_back(code);
  }
  return meta;
}

double json_number(const ordered_json& v, const std::string& origin, const std::string& where) {
  if (!v.is_number()) throw ParseError(origin, 0, 0, where + " must be a number");
  return v.get<double>();
}

Component json_component(const std::string& key, const std::string& origin) {
  auto c = parse_component(key);
  if (!c) throw ParseError(origin, 0, 0, "unknown final-demand component '" + key + "'");
  return *c;
}

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& origin, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(origin, 0, 0, "unknown key '" + key + "' in " + where);
    }
  }
}

}  // namespace

std::vector<CsvRow> read_csv(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t line = 1;
  row.line = 1;

  auto end_row = [&] {
    row.cells.push_back(std::move(cell));
    cell.clear();
    const bool blank = row.cells.size() == 1 && row.cells[0].empty() && !cell_started;
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    cell_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        cell_started = true;
        break;
      case ',':
        row.cells.push_back(std::move(cell));
        cell.clear();
        cell_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row.line = line;
        break;
      default:
        cell += c;
        cell_started = true;
    }
  }
  if (quoted) throw ParseError(path.string(), line, 0, "unterminated quoted field");
  if (cell_started || !cell.empty()) end_row();
  return rows;
}

double parse_number(std::string_view cell, const std::string& file, std::size_t line,
                    std::size_t column) {
  const std::string_view s = trim(cell);
  if (s.empty()) throw ParseError(file, line, column, "empty numeric cell");
  std::string_view digits = s;
  if (digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || !std::isfinite(value)) {
    throw ParseError(file, line, column, "malformed number '" + std::string(s) + "'");
  }
  return value;
}

IOTable parse_io_table(const fs::path& table_file, const fs::path& sector_metadata_file,
                       const std::vector<fs::path>& satellite_files) {
  const std::string file = table_file.string();
  const auto rows = read_csv(table_file);
  if (rows.empty()) throw ParseError(file, 1, 1, "empty table file");

  // Header: sector, codes..., HH..EXP, total_output
  const auto& header = rows.front();
  if (header.cells.empty() || trim(header.cells[0]) != "sector") {
    throw ParseError(file, header.line, 1, "header must start with 'sector'");
  }
  // The trailing block is fixed, so the sector count comes from the width. A
  // sector may be coded like a component (HH is also human health).
  if (header.cells.size() < 1 + 1 + kComponentCount + 1) {
    throw ParseError(file, header.line, header.cells.size(),
                     "header has " + std::to_string(header.cells.size()) +
                         " columns, expected at least " + std::to_string(kComponentCount + 3));
  }
  const std::size_t width = header.cells.size();
  const std::size_t n = width - kComponentCount - 2;
  const std::size_t first_component = 1 + n;
  for (std::size_t c = 0; c < kComponentCount; ++c) {
    if (trim(header.cells[first_component + c]) != component_code(kComponents[c])) {
      throw ParseError(file, header.line, first_component + c + 1,
                       "expected component column '" +
                           std::string(component_code(kComponents[c])) + "'");
    }
  }
  if (trim(header.cells[width - 1]) != kTotalOutput) {
    throw ParseError(file, header.line, width, "last column must be 'total_output'");
  }

  std::vector<std::string> codes;
  for (std::size_t j = 0; j < n; ++j) {
    std::string code(trim(header.cells[1 + j]));
    if (code.empty()) throw ParseError(file, header.line, j + 2, "empty sector code");
    if (std::find(codes.begin(), codes.end(), code) != codes.end()) {
      throw ParseError(file, header.line, j + 2, "duplicate sector '" + code + "'");
    }
    codes.push_back(std::move(code));
  }

  if (rows.size() != 1 + n + kTrailingRows.size()) {
    if (rows.size() < 1 + n + kTrailingRows.size()) {
      const auto last = rows.back().line;
      throw ParseError(file, last + 1, 1,
                       "missing trailing rows: expected " + std::to_string(n) +
                           " sector rows followed by IMPORTS, VALUE_ADDED, TOTAL_USES");
    }
    throw ParseError(file, rows[1 + n + kTrailingRows.size()].line, 1,
                     "unexpected row after TOTAL_USES");
  }
  for (const auto& row : rows) {
    if (row.cells.size() != width) {
      throw ParseError(file, row.line, std::min(row.cells.size(), width) + 1,
                       "row has " + std::to_string(row.cells.size()) + " cells, expected " +
                           std::to_string(width) + " (comma decimal separator?)");
    }
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd z(ni, ni);
  Eigen::MatrixXd fd(ni, static_cast<Eigen::Index>(kComponentCount));
  Eigen::VectorXd x(ni);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[1 + i];
    if (trim(row.cells[0]) != codes[i]) {
      throw ParseError(file, row.line, 1,
                       "row label '" + std::string(trim(row.cells[0])) + "' does not match column '" +
                           codes[i] + "'");
    }
    for (std::size_t j = 0; j < n; ++j) {
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_number(row.cells[1 + j], file, row.line, j + 2);
    }
    for (std::size_t c = 0; c < kComponentCount; ++c) {
      fd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          parse_number(row.cells[1 + n + c], file, row.line, n + c + 2);
    }
    x(static_cast<Eigen::Index>(i)) = parse_number(row.cells[width - 1], file, row.line, width);
  }

  std::array<Eigen::VectorXd, kTrailingRows.size()> trailing;
  for (std::size_t t = 0; t < kTrailingRows.size(); ++t) {
    const auto& row = rows[1 + n + t];
    if (trim(row.cells[0]) != kTrailingRows[t]) {
      throw ParseError(file, row.line, 1,
                       "expected trailing row '" + std::string(kTrailingRows[t]) + "', found '" +
                           std::string(trim(row.cells[0])) + "'");
    }
    trailing[t].resize(ni);
    for (std::size_t j = 0; j < n; ++j) {
      trailing[t](static_cast<Eigen::Index>(j)) = parse_number(row.cells[1 + j], file, row.line, j + 2);
    }
    // Component and total cells of trailing rows are optional.
    for (std::size_t c = n + 1; c < width; ++c) {
      if (!trim(row.cells[c]).empty()) parse_number(row.cells[c], file, row.line, c + 1);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto ji = static_cast<Eigen::Index>(j);
    const double scale = std::max(std::abs(x(ji)), 1.0);
    if (std::abs(trailing[2](ji) - x(ji)) > kTotalUsesTol * scale) {
      throw ParseError(file, rows[1 + n + 2].line, j + 2,
                       "TOTAL_USES for '" + codes[j] + "' differs from its total_output");
    }
  }

  const SectorMeta meta = parse_metadata(sector_metadata_file);
  for (const auto& code : codes) {
    if (!meta.names.count(code)) {
      throw StructuralError("sector '" + code + "' missing from metadata file " +
                            sector_metadata_file.string());
    }
  }
  for (const auto& code : meta.codes) {
    if (std::find(codes.begin(), codes.end(), code) == codes.end()) {
      throw StructuralError("unknown sector code '" + code + "' in metadata file " +
                            sector_metadata_file.string());
    }
  }
  std::vector<Sector> sectors;
  for (std::size_t i = 0; i < n; ++i) sectors.push_back({codes[i], meta.names.at(codes[i]), i});

  SatelliteMap satellites;
  for (const auto& sat_path : satellite_files) {
    const std::string sfile = sat_path.string();
    const auto srows = read_csv(sat_path);
    if (srows.empty()) throw ParseError(sfile, 1, 1, "empty satellite file");
    const auto& sh = srows.front();
    if (sh.cells.size() < 2 || trim(sh.cells[0]) != "sector") {
      throw ParseError(sfile, sh.line, 1, "expected header 'sector,<kind>[,<kind>...]'");
    }
    std::vector<SatelliteKind> kinds;
    for (std::size_t c = 1; c < sh.cells.size(); ++c) {
      auto kind = parse_satellite_kind(trim(sh.cells[c]));
      if (!kind) {
        throw ParseError(sfile, sh.line, c + 1,
                         "unknown satellite kind '" + std::string(trim(sh.cells[c])) + "'");
      }
      if (satellites.count(*kind) ||
          std::find(kinds.begin(), kinds.end(), *kind) != kinds.end()) {
        throw ParseError(sfile, sh.line, c + 1,
                         "satellite '" + std::string(satellite_name(*kind)) + "' given twice");
      }
      kinds.push_back(*kind);
    }
    std::vector<Eigen::VectorXd> values(kinds.size(), Eigen::VectorXd::Zero(ni));
    std::vector<bool> seen(n, false);
    for (std::size_t r = 1; r < srows.size(); ++r) {
      const auto& row = srows[r];
      if (row.cells.size() != sh.cells.size()) {
        throw ParseError(sfile, row.line, row.cells.size(), "row width does not match header");
      }
      const std::string code(trim(row.cells[0]));
      auto it = std::find(codes.begin(), codes.end(), code);
      if (it == codes.end()) {
        throw StructuralError(sfile + ":" + std::to_string(row.line) + ": unknown sector code '" +
                              code + "'");
      }
      const auto idx = static_cast<std::size_t>(it - codes.begin());
      if (seen[idx]) {
        throw ParseError(sfile, row.line, 1, "duplicate sector '" + code + "'");
      }
      seen[idx] = true;
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        values[k](static_cast<Eigen::Index>(idx)) =
            parse_number(row.cells[k + 1], sfile, row.line, k + 2);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) {
        throw StructuralError("satellite file " + sfile + " is missing sector '" + codes[i] + "'");
      }
    }
    for (std::size_t k = 0; k < kinds.size(); ++k) satellites.emplace(kinds[k], std::move(values[k]));
  }

  return IOTable(std::move(sectors), std::move(z), std::move(fd), std::move(trailing[0]),
                 std::move(trailing[1]), std::move(satellites), std::move(x));
}

TableFiles write_io_table(const IOTable& table, const fs::path& dir) {
  fs::create_directories(dir);
  const auto n = static_cast<Eigen::Index>(table.size());
  using detail::format_shortest;

  std::string t = "sector";
  for (const auto& s : table.sectors()) t += "," + csv_escape(s.code);
  for (auto c : kComponents) t += "," + std::string(component_code(c));
  t += "," + std::string(kTotalOutput) + "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    t += csv_escape(table.sector(static_cast<std::size_t>(i)).code);
    for (Eigen::Index j = 0; j < n; ++j) t += "," + format_shortest(table.flows()(i, j));
    for (Eigen::Index c = 0; c < table.final_demand().cols(); ++c) {
      t += "," + format_shortest(table.final_demand()(i, c));
    }
    t += "," + format_shortest(table.output()(i)) + "\n";
  }
  const std::array<const Eigen::VectorXd*, 3> trailing{&table.imports(), &table.value_added(),
                                                       &table.output()};
  for (std::size_t r = 0; r < trailing.size(); ++r) {
    t += std::string(kTrailingRows[r]);
    for (Eigen::Index j = 0; j < n; ++j) t += "," + format_shortest((*trailing[r])(j));
    for (std::size_t c = 0; c <= kComponentCount; ++c) t += ",";
    t += "\n";
  }

  TableFiles files{dir / "table.csv", dir / "sectors.csv", {}};
  write_text(files.table, t);

  std::string m = "code,name\n";
  for (const auto& s : table.sectors()) m += csv_escape(s.code) + "," + csv_escape(s.name) + "\n";
  write_text(files.sectors, m);

  std::vector<SatelliteKind> kinds;
  for (const auto& [kind, values] : table.satellites()) {
    if (kind == SatelliteKind::value_added && values == table.value_added()) continue;
    kinds.push_back(kind);
  }
  if (!kinds.empty()) {
    std::string s = "sector";
    for (auto k : kinds) s += "," + std::string(satellite_name(k));
    s += "\n";
    for (Eigen::Index i = 0; i < n; ++i) {
      s += csv_escape(table.sector(static_cast<std::size_t>(i)).code);
      for (auto k : kinds) s += "," + format_shortest(table.satellite(k)(i));
      s += "\n";
    }
    files.satellites.push_back(dir / "satellites.csv");
    write_text(files.satellites.back(), s);
  }
  return files;
}

std::map<std::string, double> parse_use_ratios(const fs::path& path) {
  const std::string file = path.string();
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().cells.size() != 2 || trim(rows.front().cells[0]) != "sector" ||
      trim(rows.front().cells[1]) != "ratio") {
    throw ParseError(file, 1, 1, "expected header 'sector,ratio'");
  }
  std::map<std::string, double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != 2) throw ParseError(file, row.line, 1, "expected 2 cells");
    const std::string code(trim(row.cells[0]));
    if (!out.emplace(code, parse_number(row.cells[1], file, row.line, 2)).second) {
      throw ParseError(file, row.line, 1, "duplicate sector '" + code + "'");
    }
  }
  return out;
}

ScenarioSpec parse_scenario(const fs::path& scenario_file) {
  return parse_scenario_text(read_file(scenario_file), scenario_file.string(),
                             scenario_file.parent_path());
}

ScenarioSpec parse_scenario_text(std::string_view text, const std::string& origin,
                                 const fs::path& base_dir) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin, 0, e.byte, e.what());
  }
  if (!j.is_object()) throw ParseError(origin, 0, 0, "scenario must be a JSON object");
  reject_unknown_keys(j,
                      {"name", "target_sector", "sub_service_drop", "component_ratios",
                       "component_changes", "reallocation", "intermediate", "blowup_factor",
                       "notes"},
                      origin, "scenario");

  ScenarioSpec spec;
  for (const char* required : {"name", "target_sector", "sub_service_drop"}) {
    if (!j.contains(required)) {
      throw ParseError(origin, 0, 0, std::string("missing required key '") + required + "'");
    }
  }
  if (!j["name"].is_string() || !j["target_sector"].is_string()) {
    throw ParseError(origin, 0, 0, "'name' and 'target_sector' must be strings");
  }
  spec.name = j["name"].get<std::string>();
  spec.target_sector = j["target_sector"].get<std::string>();
  spec.sub_service_drop = json_number(j["sub_service_drop"], origin, "sub_service_drop");
  if (j.contains("blowup_factor")) {
    spec.blowup_factor = json_number(j["blowup_factor"], origin, "blowup_factor");
  }

  if (j.contains("component_ratios")) {
    const auto& cr = j["component_ratios"];
    if (!cr.is_object()) throw ParseError(origin, 0, 0, "component_ratios must be an object");
    for (const auto& [key, value] : cr.items()) {
      spec.component_ratios[json_component(key, origin)] =
          json_number(value, origin, "component_ratios." + key);
    }
  }
  if (j.contains("component_changes")) {
    const auto& cc = j["component_changes"];
    if (!cc.is_object()) throw ParseError(origin, 0, 0, "component_changes must be an object");
    for (const auto& [key, value] : cc.items()) {
      spec.absolute_changes[json_component(key, origin)] =
          json_number(value, origin, "component_changes." + key);
    }
  }

  if (j.contains("reallocation")) {
    const auto& re = j["reallocation"];
    if (!re.is_object()) throw ParseError(origin, 0, 0, "reallocation must be an object");
    reject_unknown_keys(re, {"savings_fraction", "shares"}, origin, "reallocation");
    if (!re.empty()) {
      Reallocation r;
      if (!re.contains("savings_fraction")) {
        throw ParseError(origin, 0, 0, "reallocation.savings_fraction is required");
      }
      r.savings_fraction = json_number(re["savings_fraction"], origin, "savings_fraction");
      if (re.contains("shares")) {
        if (!re["shares"].is_object()) throw ParseError(origin, 0, 0, "shares must be an object");
        for (const auto& [code, share] : re["shares"].items()) {
          r.shares.emplace_back(code, json_number(share, origin, "shares." + code));
        }
      }
      spec.reallocation = std::move(r);
    }
  }

  if (j.contains("intermediate")) {
    const auto& im = j["intermediate"];
    if (!im.is_object()) throw ParseError(origin, 0, 0, "intermediate must be an object");
    reject_unknown_keys(im, {"apply", "default_ratio", "use_ratios", "use_ratios_file"}, origin,
                        "intermediate");
    IntermediateShock shock;
    if (im.contains("apply")) {
      if (!im["apply"].is_boolean()) throw ParseError(origin, 0, 0, "apply must be a boolean");
      shock.apply = im["apply"].get<bool>();
    }
    if (im.contains("default_ratio")) {
      shock.use_ratios.default_ratio = json_number(im["default_ratio"], origin, "default_ratio");
    }
    if (im.contains("use_ratios_file")) {
      if (!im["use_ratios_file"].is_string()) {
        throw ParseError(origin, 0, 0, "use_ratios_file must be a string");
      }
      fs::path p = im["use_ratios_file"].get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      shock.use_ratios.by_sector = parse_use_ratios(p);
    }
    if (im.contains("use_ratios")) {
      if (!im["use_ratios"].is_object()) throw ParseError(origin, 0, 0, "use_ratios must be an object");
      for (const auto& [code, r] : im["use_ratios"].items()) {
        shock.use_ratios.by_sector[code] = json_number(r, origin, "use_ratios." + code);
      }
    }
    spec.intermediate = std::move(shock);
  }

  validate_scenario(spec);
  return spec;
}

BlowupHistory parse_blowup_history(const fs::path& path) {
  const std::string origin = path.string();
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin, 0, e.byte, e.what());
  }
  BlowupHistory h;
  auto read_series = [&](const char* key, std::map<int, double>& out) {
    if (!j.contains(key) || !j[key].is_object()) {
      throw ParseError(origin, 0, 0, std::string("'") + key + "' must be an object keyed by year");
    }
    for (const auto& [year, value] : j[key].items()) {
      int y = 0;
      auto [ptr, ec] = std::from_chars(year.data(), year.data() + year.size(), y);
      if (ec != std::errc() || ptr != year.data() + year.size()) {
        throw ParseError(origin, 0, 0, "bad year '" + year + "'");
      }
      out[y] = json_number(value, origin, std::string(key) + "." + year);
    }
  };
  read_series("final_demand", h.final_demand);
  read_series("gdp_growth", h.gdp_growth);
  return h;
}

std::vector<double> disaggregate_aggregate(double total, const std::vector<double>& weights,
                                           Rounding rounding) {
  if (weights.empty()) throw PreconditionError("no weights to disaggregate over");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw PreconditionError("disaggregation weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw PreconditionError("disaggregation weights are all zero");

  std::vector<double> parts(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) parts[i] = total * (weights[i] / sum);
  if (rounding == Rounding::none) return parts;

  if (total != std::floor(total)) {
    throw PreconditionError("largest-remainder rounding needs an integral total");
  }
  std::vector<double> remainder(parts.size());
  double assigned = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double whole = std::floor(parts[i]);
    remainder[i] = parts[i] - whole;
    parts[i] = whole;
    assigned += whole;
  }
  std::vector<std::size_t> order(parts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  auto left = static_cast<std::size_t>(std::llround(total - assigned));
  for (std::size_t r = 0; r < left && r < order.size(); ++r) parts[order[r]] += 1.0;
  return parts;
}

}  // namespace ioshock
