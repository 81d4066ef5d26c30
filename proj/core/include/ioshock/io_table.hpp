#pragma once

// Validated in-memory input-output table with satellite accounts.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ioshock {

/// Final-demand components, in table column order.
enum class Component : std::size_t { household = 0, npish, government, gfcf, inventory, exports };

inline constexpr std::size_t kComponentCount = 6;
inline constexpr std::array<Component, kComponentCount> kComponents{
    Component::household, Component::npish,     Component::government,
    Component::gfcf,      Component::inventory, Component::exports};

/// Column code used in table files ("HH", "NPISH", "GOV", "GFCF", "INV", "EXP").
std::string_view component_code(Component c) noexcept;
std::optional<Component> parse_component(std::string_view code) noexcept;

enum class SatelliteKind { income, value_added, employment, capital_formation };

inline constexpr std::array<SatelliteKind, 4> kSatelliteKinds{
    SatelliteKind::income, SatelliteKind::value_added, SatelliteKind::employment,
    SatelliteKind::capital_formation};

std::string_view satellite_name(SatelliteKind kind) noexcept;
std::optional<SatelliteKind> parse_satellite_kind(std::string_view name) noexcept;

struct Sector {
  std::string code;
  std::string name;
  std::size_t index = 0;

  friend bool operator==(const Sector&, const Sector&) = default;
};

using SatelliteMap = std::map<SatelliteKind, Eigen::VectorXd>;

/// Monetary amounts are millions of currency units at basic prices.
inline constexpr std::string_view kCurrencyUnit = "millions";

/// Square industry-by-industry table. Immutable once constructed.
///
/// The constructor enforces structure only (dimensions, unique codes); the
/// accounting identities are checked by validate_table. When no value-added
/// satellite is supplied, the value-added row doubles as one.
class IOTable {
 public:
  /// Throws StructuralError on dimension mismatch or duplicate sector codes.
  /// Sector indices are reassigned to their position.
  IOTable(std::vector<Sector> sectors, Eigen::MatrixXd flows, Eigen::MatrixXd final_demand,
          Eigen::VectorXd imports, Eigen::VectorXd value_added, SatelliteMap satellites,
          Eigen::VectorXd output);

  std::size_t size() const noexcept { return sectors_.size(); }
  const std::vector<Sector>& sectors() const noexcept { return sectors_; }
  const Sector& sector(std::size_t i) const { return sectors_.at(i); }

  std::optional<std::size_t> find(std::string_view code) const noexcept;
  /// Like find, but throws StructuralError for an unknown code.
  std::size_t index_of(std::string_view code) const;

  /// Z: n x n, row i sells to column j.
  const Eigen::MatrixXd& flows() const noexcept { return flows_; }
  /// n x kComponentCount, columns ordered as kComponents.
  const Eigen::MatrixXd& final_demand() const noexcept { return final_demand_; }
  Eigen::VectorXd final_demand_total() const { return final_demand_.rowwise().sum(); }
  double final_demand(std::size_t sector, Component c) const {
    return final_demand_(static_cast<Eigen::Index>(sector), static_cast<Eigen::Index>(c));
  }
  const Eigen::VectorXd& imports() const noexcept { return imports_; }
  const Eigen::VectorXd& value_added() const noexcept { return value_added_; }
  const SatelliteMap& satellites() const noexcept { return satellites_; }
  bool has_satellite(SatelliteKind kind) const noexcept { return satellites_.count(kind) != 0; }
  /// Throws PreconditionError if absent.
  const Eigen::VectorXd& satellite(SatelliteKind kind) const;
  const Eigen::VectorXd& output() const noexcept { return output_; }

  friend bool operator==(const IOTable&, const IOTable&);

 private:
  std::vector<Sector> sectors_;
  Eigen::MatrixXd flows_;
  Eigen::MatrixXd final_demand_;
  Eigen::VectorXd imports_;
  Eigen::VectorXd value_added_;
  SatelliteMap satellites_;
  Eigen::VectorXd output_;
};

// Identity tolerances. Published national accounts are rounded to whole millions.
inline constexpr double kSyntheticRelTol = 1e-6;
inline constexpr double kIngestedRelTol = 5e-3;

enum class ViolationKind {
  row_identity,
  column_identity,
  negative_flow,
  nonpositive_output,
  negative_employment,
};

std::string_view violation_name(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::size_t sector;  // row sector for flows
  std::size_t column;  // column sector for negative_flow, else == sector
  double expected;
  double actual;
  double rel_error;
};

struct ValidationWarning {
  std::size_t sector;
  std::string message;
};

struct ValidationReport {
  double rel_tol = kSyntheticRelTol;
  std::vector<Violation> violations;
  std::vector<ValidationWarning> warnings;
  bool passed = true;
};

/// Checks the row identity x_i = sum_j Z_ij + sum_c f_ic, the column identity
/// x_j = sum_i Z_ij + imports_j + va_j, non-negative flows and positive output.
/// Negative final demand outside inventory changes and income above value
/// added only produce warnings.
ValidationReport validate_table(const IOTable& table, double rel_tol = kSyntheticRelTol);

struct DropResult {
  IOTable table;
  std::vector<Sector> dropped;
};

/// Removes sectors whose total output is not strictly positive, re-indexing
/// every block consistently.
DropResult drop_zero_sectors(const IOTable& table);

}  // namespace ioshock
