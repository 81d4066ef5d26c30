#pragma once

// File formats: IO table CSV, sector metadata, satellite accounts, use ratios,
// scenario JSON and blowup history JSON. See docs/file_formats.md.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ioshock/io_table.hpp"
#include "ioshock/scenario.hpp"

namespace ioshock {

/// Minimal RFC 4180 reader: comma separated, double-quoted fields with ""
/// escapes, LF or CRLF line endings. Blank lines are skipped.
struct CsvRow {
  std::size_t line = 0;  // 1-based
  std::vector<std::string> cells;
};
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

/// Strict decimal parse of a whole cell (period separator, optional sign and
/// exponent, surrounding blanks ignored). Throws ParseError at the coordinate.
double parse_number(std::string_view cell, const std::string& file, std::size_t line,
                    std::size_t column);

/// Reads the table, the sector metadata file (code,name) and any number of
/// satellite files (sector,<kind>[,<kind>...]). No partially built table
/// escapes: any failure throws ParseError or StructuralError.
IOTable parse_io_table(const std::filesystem::path& table_file,
                       const std::filesystem::path& sector_metadata_file,
                       const std::vector<std::filesystem::path>& satellite_files = {});

/// Writes table.csv, sectors.csv and, when the table carries satellites beyond
/// the value-added row, satellites.csv into dir. Numbers use the shortest
/// representation that round-trips.
struct TableFiles {
  std::filesystem::path table;
  std::filesystem::path sectors;
  std::vector<std::filesystem::path> satellites;
};
TableFiles write_io_table(const IOTable& table, const std::filesystem::path& dir);

/// sector,ratio
std::map<std::string, double> parse_use_ratios(const std::filesystem::path& path);

/// Scenario JSON. Relative use_ratios_file paths resolve against the scenario
/// file's directory. Throws ParseError on schema violations and ConfigError on
/// semantic ones (share sums, ranges).
ScenarioSpec parse_scenario(const std::filesystem::path& scenario_file);
ScenarioSpec parse_scenario_text(std::string_view json, const std::string& origin = "<memory>",
                                 const std::filesystem::path& base_dir = {});

struct BlowupHistory {
  std::map<int, double> final_demand;
  std::map<int, double> gdp_growth;
};
/// {"final_demand": {"2015": ...}, "gdp_growth": {"2016": 0.02, ...}}
BlowupHistory parse_blowup_history(const std::filesystem::path& path);

enum class Rounding { none, largest_remainder };

/// Splits total proportionally to weights. With largest_remainder the parts
/// are whole numbers summing exactly to total (which must be integral); ties
/// in the remainder go to the lower index. Throws PreconditionError when the
/// weights are negative or all zero.
std::vector<double> disaggregate_aggregate(double total, const std::vector<double>& weights,
                                           Rounding rounding = Rounding::none);

}  // namespace ioshock
