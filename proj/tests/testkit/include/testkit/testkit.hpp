#pragma once

// Oracles and generators for property tests. Nothing here calls into the
// library's solvers; everything is computed from first principles.

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "ioshock/io_table.hpp"

namespace testkit {

inline constexpr int kDefaultNeumannTerms = 200;
inline constexpr double kDivergenceNorm = 1e6;

/// Sum_{k=0}^{K} A^k. Throws ioshock::NonProductiveError when the partial
/// sums exceed kDivergenceNorm in the infinity norm. For column sums bounded
/// by s < 1 the truncation error is at most s^(K+1) / (1 - s) in the 1-norm.
Eigen::MatrixXd neumann_oracle(const Eigen::MatrixXd& A, int K = kDefaultNeumannTerms);

/// Solves (I - M) v = b by Jacobi iteration v <- M v + b until the update
/// falls below tol (sup norm). Intended for M with spectral radius < 1.
Eigen::VectorXd fixed_point_oracle(const Eigen::MatrixXd& M, const Eigen::VectorXd& b,
                                   double tol = 1e-15, int max_iter = 100000);

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

struct EconomyGenSpec {
  std::size_t n = 5;
  std::uint64_t seed = 1;
  double max_column_sum = 0.8;
  Range final_demand{10.0, 1000.0};
  /// Jobs per unit of output.
  Range employment_rate{0.05, 2.0};
  /// Share of value added paid out as income.
  Range income_share{0.3, 0.9};
  /// Capital formation per unit of output.
  Range capital_rate{0.0, 0.2};
  /// Share of the non-intermediate column residual booked as imports.
  Range import_share{0.0, 0.5};
  /// Fraction of the A entries forced to zero.
  double sparsity = 0.2;
};

/// Deterministic per spec. A is drawn first with column sums at most
/// max_column_sum, x solves (I - A) x = f, Z = A diag(x), and finally x is
/// re-derived as the row sum of Z plus f so the row identity is exact.
ioshock::IOTable random_economy(const EconomyGenSpec& spec);

/// Z=[[50,20],[30,40]], household demand [30,30], x=[100,100],
/// employment [10,20], income [20,25], value added [20,40], imports [0,0].
ioshock::IOTable canonical_e2();

/// Random vector with entries in [lo, hi], deterministic per seed.
Eigen::VectorXd random_vector(std::size_t n, std::uint64_t seed, double lo, double hi);

}  // namespace testkit
