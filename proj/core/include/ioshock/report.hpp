#pragma once

// Report bundle serialization (CSV and JSON) with a digest manifest.
//
// Rounding: nominal amounts to whole currency millions (employment to whole
// headcount), normalized changes and fractions to 6 decimals, multipliers and
// coefficients to 5 decimals.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ioshock/io_table.hpp"
#include "ioshock/leontief.hpp"
#include "ioshock/shock_analysis.hpp"

namespace ioshock {

enum class ReportFormat { csv, json };

std::optional<ReportFormat> parse_report_format(std::string_view name) noexcept;

struct MultiplierTable {
  std::vector<Sector> sectors;
  Eigen::VectorXd output;
  std::map<SatelliteKind, Eigen::VectorXd> satellite;
};

MultiplierTable compute_multipliers(const LeontiefModel& model);

/// Linkage view of one sector (input recipe, downstream importance, its own
/// multipliers and import share).
struct SectorProfile {
  Sector sector;
  std::vector<RankedSector> input_recipe;
  std::vector<RankedSector> downstream;
  double output_multiplier = 0.0;
  std::map<SatelliteKind, double> satellite_multipliers;
  double import_share = 0.0;
  /// 1-based rank counted from the lowest output multiplier.
  std::size_t rank_from_lowest = 0;
};

SectorProfile sector_profile(const LeontiefModel& model, std::size_t sector, std::size_t top_k);

struct ReportBundle {
  std::vector<Sector> sectors;
  std::optional<ValidationReport> validation;
  std::optional<MultiplierTable> multipliers;
  std::optional<SectorProfile> profile;
  std::vector<ImpactResult> impacts;
  std::optional<ComparisonReport> comparison;
  /// Length of the plot-data series; also names plotdata_top<k>.
  std::size_t top_k = 10;
};

struct ManifestEntry {
  std::filesystem::path path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Writes one file per report per format into out_dir (created if needed) and
/// a manifest.json listing every file with its SHA-256. Output is a pure
/// function of the bundle. Throws ConfigError for an empty format set and
/// Error for unwritable paths.
std::vector<ManifestEntry> write_reports(const ReportBundle& bundle,
                                         const std::filesystem::path& out_dir,
                                         const std::set<ReportFormat>& formats);

std::string sha256_hex(std::string_view data);

/// Reads an impact_<method>.json written by write_reports. Values carry the
/// report rounding.
ImpactResult read_impact_json(const std::filesystem::path& path);

/// Number rendering used in every report.
std::string format_nominal(double v);
std::string format_fraction(double v);
std::string format_coefficient(double v);

}  // namespace ioshock
