#include "ioshock/leontief.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ioshock/error.hpp"

namespace ioshock {

namespace {

constexpr int kMaxSquarings = 40;
constexpr double kDivergenceNorm = 1e100;
// Hard ceiling on ||L(I - A) - I||; anything above it is a numerical failure.
constexpr double kInverseResidualTol = 1e-6;

double max_column_sum(const Eigen::MatrixXd& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }
double max_row_sum(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

void require_positive_output(const IOTable& table) {
  const auto& x = table.output();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (!(x(j) > 0.0)) {
      throw PreconditionError("sector '" + table.sector(static_cast<std::size_t>(j)).code +
                              "' has non-positive output " + std::to_string(x(j)) +
                              "; drop zero-output sectors first");
    }
  }
}

}  // namespace

TechnicalCoefficients technical_coefficients(const IOTable& table) {
  require_positive_output(table);
  const Eigen::VectorXd inv_x = table.output().cwiseInverse();

  TechnicalCoefficients c;
  c.A = table.flows() * inv_x.asDiagonal();
  c.import_coefficients = table.imports().cwiseProduct(inv_x);
  for (const auto& [kind, values] : table.satellites()) {
    c.satellite_coefficients.emplace(kind, values.cwiseProduct(inv_x));
  }
  return c;
}

bool is_productive(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return true;
  if (!A.allFinite()) return false;
  Eigen::MatrixXd power = A;
  for (int m = 0; m <= kMaxSquarings; ++m) {
    const double c = max_column_sum(power);
    const double r = max_row_sum(power);
    if (c < 1.0 || r < 1.0) return true;
    if (!std::isfinite(c) || c > kDivergenceNorm) return false;
    power = power * power;
  }
  return false;
}

Eigen::MatrixXd leontief_inverse(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw StructuralError("coefficient matrix is not square");
  const auto n = A.rows();
  if (!is_productive(A)) {
    throw NonProductiveError("Neumann series of A diverges (max column sum " +
                             std::to_string(max_column_sum(A)) +
                             "); the economy is not productive");
  }

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd leontief = I - A;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(leontief);
  Eigen::MatrixXd L = lu.solve(I);

  // (I - A) e_j = e_j when column j of A is zero, so column j of L is exactly e_j.
  for (Eigen::Index j = 0; j < n; ++j) {
    if ((A.col(j).array() == 0.0).all()) {
      L.col(j).setZero();
      L(j, j) = 1.0;
    }
  }

  if (!L.allFinite()) throw NonProductiveError("I - A is singular");
  const double residual = (L * leontief - I).cwiseAbs().rowwise().sum().maxCoeff();
  if (residual > kInverseResidualTol) {
    throw NonProductiveError("I - A is numerically singular (residual " + std::to_string(residual) +
                             ")");
  }
  return L;
}

LeontiefModel LeontiefModel::build(IOTable table) {
  if (table.size() == 0) throw StructuralError("empty economy: table has no sectors");
  auto coeffs = technical_coefficients(table);
  return build(std::move(table), std::move(coeffs));
}

LeontiefModel LeontiefModel::build(IOTable table, TechnicalCoefficients coeffs) {
  if (table.size() == 0) throw StructuralError("empty economy: table has no sectors");
  const auto n = static_cast<Eigen::Index>(table.size());
  if (coeffs.A.rows() != n || coeffs.A.cols() != n) {
    throw StructuralError("coefficient matrix does not match table size");
  }
  Eigen::MatrixXd L = leontief_inverse(coeffs.A);
  return LeontiefModel(std::move(table), std::move(coeffs), std::move(L));
}

Eigen::VectorXd output_multipliers(const LeontiefModel& model) {
  return model.L().colwise().sum().transpose();
}

Eigen::VectorXd satellite_multipliers(const LeontiefModel& model, SatelliteKind kind) {
  const auto& sc = model.coeffs().satellite_coefficients;
  auto it = sc.find(kind);
  if (it == sc.end()) {
    throw PreconditionError("no " + std::string(satellite_name(kind)) + " satellite on the table");
  }
  return (it->second.transpose() * model.L()).transpose();
}

std::vector<RankedSector> rank_sectors(const std::vector<Sector>& sectors,
                                       const Eigen::VectorXd& values, std::size_t top_k,
                                       RankOrder order, bool skip_zero) {
  if (static_cast<std::size_t>(values.size()) != sectors.size()) {
    throw StructuralError("ranking values do not match sector count");
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    if (skip_zero && values(static_cast<Eigen::Index>(i)) == 0.0) continue;
    idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double va = values(static_cast<Eigen::Index>(a));
    const double vb = values(static_cast<Eigen::Index>(b));
    return order == RankOrder::descending ? va > vb : va < vb;
  });
  if (idx.size() > top_k) idx.resize(top_k);

  std::vector<RankedSector> out;
  out.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.push_back({sectors[idx[r]], values(static_cast<Eigen::Index>(idx[r])), r + 1});
  }
  return out;
}

std::vector<RankedSector> input_recipe(const LeontiefModel& model, std::size_t sector,
                                       std::size_t top_k) {
  if (sector >= model.size()) throw StructuralError("unknown sector index " + std::to_string(sector));
  const Eigen::VectorXd column = model.A().col(static_cast<Eigen::Index>(sector));
  return rank_sectors(model.table().sectors(), column, top_k, RankOrder::descending, true);
}

std::vector<RankedSector> downstream_importance(const LeontiefModel& model, std::size_t sector,
                                                std::size_t top_k) {
  if (sector >= model.size()) throw StructuralError("unknown sector index " + std::to_string(sector));
  const Eigen::VectorXd row = model.A().row(static_cast<Eigen::Index>(sector)).transpose();
  return rank_sectors(model.table().sectors(), row, top_k, RankOrder::descending, true);
}

double import_share(const TechnicalCoefficients& coeffs, std::size_t sector) {
  if (sector >= static_cast<std::size_t>(coeffs.import_coefficients.size())) {
    throw StructuralError("unknown sector index " + std::to_string(sector));
  }
  return coeffs.import_coefficients(static_cast<Eigen::Index>(sector));
}

}  // namespace ioshock
