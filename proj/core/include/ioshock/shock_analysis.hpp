#pragma once

// Economy-wide impact of a demand shock: inoperability analysis, partial and
// full hypothetical extraction, satellite translation and final-demand blowup.
//
// Sign convention: every delta is signed, losses negative. The normalized
// output change q_i = dx_i / x_i is therefore negative for a loss. The
// inoperability fixed point q = A* q + f* is stated in loss terms, so
// f* = -delta_f / x and its solution equals -q.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ioshock/leontief.hpp"
#include "ioshock/scenario.hpp"

namespace ioshock {

/// a*_ij = a_ij x_j / x_i.
Eigen::MatrixXd interdependency_matrix(const LeontiefModel& model);

/// f*_i = -delta_f_i / x_i (positive for a demand loss).
Eigen::VectorXd demand_perturbation(const Eigen::VectorXd& delta_f, const Eigen::VectorXd& x);

/// Solves (I - A*) q_loss = f* directly. Independent of L.
Eigen::VectorXd solve_inoperability_fixed_point(const Eigen::MatrixXd& interdependency,
                                                const Eigen::VectorXd& perturbation);

enum class Method { inoperability, extraction, full_extraction };

std::string_view method_name(Method m) noexcept;

using SatelliteDeltas = std::map<SatelliteKind, Eigen::VectorXd>;

struct ImpactAggregates {
  double output_change = 0.0;
  /// Baseline total output the percentage refers to (scaled with the blowup).
  double total_output = 0.0;
  /// output_change / total_output, as a fraction.
  double output_change_fraction = 0.0;
  std::map<SatelliteKind, double> satellite_change;
};

struct ImpactResult {
  Method method = Method::inoperability;
  std::string scenario;
  std::vector<Sector> sectors;
  /// Baseline output x (scaled with the blowup).
  Eigen::VectorXd baseline;
  /// dx_i / x_i, dimensionless. Invariant under blowup.
  Eigen::VectorXd q;
  /// Nominal output change, currency millions.
  Eigen::VectorXd dx;
  SatelliteDeltas satellites;
  ImpactAggregates aggregates;
  double blowup_applied = 1.0;
};

/// Delta h = h_c * dx element-wise for every satellite on the model.
SatelliteDeltas satellite_deltas(const LeontiefModel& model, const Eigen::VectorXd& dx);

/// Fixed-point agreement threshold for the inoperability cross-check.
inline constexpr double kFixedPointTol = 1e-9;

/// dx = L delta_f, q = dx / x, cross-checked against the fixed point form.
/// Throws ConsistencyError if the two routes disagree beyond kFixedPointTol.
ImpactResult inoperability(const LeontiefModel& model, const DemandDelta& delta,
                           const std::string& scenario = {});

/// Partial extraction of target sector k's deliveries. b_k is row k of A with
/// a zero on the diagonal.
class ExtractionSpec {
 public:
  /// f_bar = f + demand_change. Throws PreconditionError on an alpha outside
  /// [0, 1], a size mismatch or an out-of-range target.
  ExtractionSpec(std::size_t target, Eigen::VectorXd alpha, Eigen::VectorXd demand_change);

  /// Uniform alpha on every purchaser.
  static ExtractionSpec uniform(std::size_t target, double alpha, std::size_t n,
                                Eigen::VectorXd demand_change);
  /// Intensities from the scenario and f_bar = f + delta_f.
  static ExtractionSpec from_scenario(const LeontiefModel& model, const ScenarioSpec& spec,
                                      const DemandDelta& delta);

  std::size_t target() const noexcept { return target_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Eigen::VectorXd& demand_change() const noexcept { return demand_change_; }

  /// (a_k1, ..., 0, ..., a_kn)
  Eigen::RowVectorXd b_k(const Eigen::MatrixXd& A) const;
  /// a_bar_kj = a_kj (1 - alpha_j) for j != k; everything else as in A.
  Eigen::MatrixXd extracted_coefficients(const Eigen::MatrixXd& A) const;

 private:
  std::size_t target_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd demand_change_;
};

/// x_bar = (I - A_bar)^-1 f_bar, dx = x_bar - x against the table's own x.
/// Throws NonProductiveError when A_bar is not productive.
ImpactResult partial_extraction(const LeontiefModel& model, const ExtractionSpec& spec,
                                const std::string& scenario = {});

/// Classical extraction: row and column k of A and f_k removed. Throws
/// StructuralError for a one-sector economy.
ImpactResult full_extraction(const LeontiefModel& model, std::size_t k,
                             const std::string& scenario = {});
/// As above with f_bar = f + demand_change (f_bar_k is still zeroed).
ImpactResult full_extraction(const LeontiefModel& model, std::size_t k,
                             Eigen::VectorXd demand_change, const std::string& scenario = {});

/// Scales every nominal delta and baseline by b. q and the output fraction are
/// carried over untouched.
ImpactResult apply_blowup(ImpactResult result, double b);

/// b = prod(1 + mean(ratios) * g) over projection-year GDP growth rates g.
double blowup_from_ratios(const std::vector<double>& ratios,
                          const std::vector<double>& projection_growth);

/// Historical ratios are (fd_y / fd_{y-1} - 1) / gdp_growth_y for every year
/// with both levels and a growth rate; projection years are the growth years
/// after the last final-demand year. Requires at least two ratios.
double estimate_blowup_factor(const std::map<int, double>& final_demand_history,
                              const std::map<int, double>& gdp_growth);

struct AggregateDifference {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double difference = 0.0;  // a - b
};

struct ComparisonReport {
  Method method_a;
  Method method_b;
  std::string scenario;
  std::vector<Sector> sectors;
  /// a.dx - b.dx and a.q - b.q per sector.
  Eigen::VectorXd dx_difference;
  Eigen::VectorXd q_difference;
  std::vector<AggregateDifference> aggregates;
  /// Sectors in both top-k loss lists (by q), in a's order.
  std::vector<Sector> top_overlap;
  std::size_t top_k = 0;
};

/// Throws StructuralError when the two results cover different sectors.
ComparisonReport compare_methods(const ImpactResult& a, const ImpactResult& b,
                                 std::size_t top_k = 10);

}  // namespace ioshock
