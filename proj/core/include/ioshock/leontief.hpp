#pragma once

// Technical coefficients, the Leontief inverse and multiplier families.

#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "ioshock/io_table.hpp"

namespace ioshock {

struct TechnicalCoefficients {
  /// a_ij = z_ij / x_j
  Eigen::MatrixXd A;
  /// imports_j / x_j
  Eigen::VectorXd import_coefficients;
  /// h_j / x_j for every satellite on the table (value added always present).
  std::map<SatelliteKind, Eigen::VectorXd> satellite_coefficients;
};

/// Throws PreconditionError if any output is not strictly positive.
TechnicalCoefficients technical_coefficients(const IOTable& table);

/// True when the Neumann series of A converges: some induced norm of a
/// repeated square A^(2^m) drops below one. Covers column-sum < 1 directly.
bool is_productive(const Eigen::MatrixXd& A);

/// (I - A)^-1 by LU factorization. Throws NonProductiveError if A fails
/// is_productive or I - A is numerically singular.
Eigen::MatrixXd leontief_inverse(const Eigen::MatrixXd& A);

/// Coefficients and Leontief inverse bound to the table they came from.
class LeontiefModel {
 public:
  /// Derives coefficients and the inverse. Throws StructuralError for an empty
  /// table, PreconditionError for zero output, NonProductiveError otherwise.
  static LeontiefModel build(IOTable table);
  static LeontiefModel build(IOTable table, TechnicalCoefficients coeffs);

  const IOTable& table() const noexcept { return table_; }
  const TechnicalCoefficients& coeffs() const noexcept { return coeffs_; }
  const Eigen::MatrixXd& A() const noexcept { return coeffs_.A; }
  const Eigen::MatrixXd& L() const noexcept { return L_; }
  const Eigen::VectorXd& output() const noexcept { return table_.output(); }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  LeontiefModel(IOTable table, TechnicalCoefficients coeffs, Eigen::MatrixXd L)
      : table_(std::move(table)), coeffs_(std::move(coeffs)), L_(std::move(L)) {}

  IOTable table_;
  TechnicalCoefficients coeffs_;
  Eigen::MatrixXd L_;
};

/// Column sums of L.
Eigen::VectorXd output_multipliers(const LeontiefModel& model);

/// h_c' L. Employment multipliers are jobs per currency-million of final demand.
/// Throws PreconditionError when the table lacks that satellite.
Eigen::VectorXd satellite_multipliers(const LeontiefModel& model, SatelliteKind kind);

struct RankedSector {
  Sector sector;
  double value = 0.0;
  std::size_t rank = 0;  // 1-based
};

enum class RankOrder { descending, ascending };

/// Stable ranking with ties broken by sector index. top_k == 0 returns an
/// empty list; pass sectors.size() for a full ranking.
std::vector<RankedSector> rank_sectors(const std::vector<Sector>& sectors,
                                       const Eigen::VectorXd& values, std::size_t top_k,
                                       RankOrder order = RankOrder::descending,
                                       bool skip_zero = false);

/// Largest entries of column `sector` of A (what the sector buys per unit output).
std::vector<RankedSector> input_recipe(const LeontiefModel& model, std::size_t sector,
                                       std::size_t top_k);

/// Largest entries of row `sector` of A (how much each buyer relies on it).
std::vector<RankedSector> downstream_importance(const LeontiefModel& model, std::size_t sector,
                                                std::size_t top_k);

double import_share(const TechnicalCoefficients& coeffs, std::size_t sector);

}  // namespace ioshock
