#include "ioshock/shock_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ioshock/error.hpp"

namespace ioshock {

namespace {

ImpactResult make_result(const LeontiefModel& model, Method method, Eigen::VectorXd dx,
                         const std::string& scenario) {
  ImpactResult r;
  r.method = method;
  r.scenario = scenario;
  r.sectors = model.table().sectors();
  r.baseline = model.output();
  r.q = dx.cwiseQuotient(r.baseline);
  r.satellites = satellite_deltas(model, dx);
  r.aggregates.output_change = dx.sum();
  r.aggregates.total_output = r.baseline.sum();
  r.aggregates.output_change_fraction = r.aggregates.output_change / r.aggregates.total_output;
  for (const auto& [kind, delta] : r.satellites) r.aggregates.satellite_change[kind] = delta.sum();
  r.dx = std::move(dx);
  return r;
}

// x_bar - x = (I - A_bar)^-1 [(f_bar - f) - (A - A_bar) x]. Measuring the change
// directly keeps the baseline at the table's own x and makes alpha = 0 collapse
// onto L delta_f.
Eigen::VectorXd extraction_change(const LeontiefModel& model, const Eigen::MatrixXd& a_bar,
                                  const Eigen::VectorXd& delta_f) {
  const Eigen::MatrixXd l_bar = leontief_inverse(a_bar);
  const Eigen::VectorXd removed = (model.A() - a_bar) * model.output();
  return l_bar * (delta_f - removed);
}

void require_same_size(const Eigen::VectorXd& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw PreconditionError(std::string(what) + " has " + std::to_string(v.size()) +
                            " entries, expected " + std::to_string(n));
  }
}

std::vector<std::size_t> top_losses(const ImpactResult& r, std::size_t k) {
  auto ranked = rank_sectors(r.sectors, r.q, k, RankOrder::ascending, true);
  std::vector<std::size_t> out;
  for (const auto& e : ranked) {
    if (e.value < 0.0) out.push_back(e.sector.index);
  }
  return out;
}

}  // namespace

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::inoperability:
      return "inoperability";
    case Method::extraction:
      return "extraction";
    case Method::full_extraction:
      return "full_extraction";
  }
  return "unknown";
}

Eigen::MatrixXd interdependency_matrix(const LeontiefModel& model) {
  const auto& x = model.output();
  return x.cwiseInverse().asDiagonal() * model.A() * x.asDiagonal();
}

Eigen::VectorXd demand_perturbation(const Eigen::VectorXd& delta_f, const Eigen::VectorXd& x) {
  if (delta_f.size() != x.size()) throw PreconditionError("delta_f and x differ in length");
  if ((x.array() <= 0.0).any()) throw PreconditionError("output must be strictly positive");
  return -delta_f.cwiseQuotient(x);
}

Eigen::VectorXd solve_inoperability_fixed_point(const Eigen::MatrixXd& interdependency,
                                                const Eigen::VectorXd& perturbation) {
  const auto n = interdependency.rows();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - interdependency;
  return system.partialPivLu().solve(perturbation);
}

SatelliteDeltas satellite_deltas(const LeontiefModel& model, const Eigen::VectorXd& dx) {
  require_same_size(dx, model.size(), "dx");
  SatelliteDeltas out;
  for (const auto& [kind, coeff] : model.coeffs().satellite_coefficients) {
    out.emplace(kind, coeff.cwiseProduct(dx));
  }
  return out;
}

ImpactResult inoperability(const LeontiefModel& model, const DemandDelta& delta,
                           const std::string& scenario) {
  require_same_size(delta.delta_f, model.size(), "delta_f");
  Eigen::VectorXd dx = model.L() * delta.delta_f;
  ImpactResult r = make_result(model, Method::inoperability, std::move(dx), scenario);

  const Eigen::VectorXd loss = solve_inoperability_fixed_point(
      interdependency_matrix(model), demand_perturbation(delta.delta_f, model.output()));
  const double scale = std::max(1.0, r.q.cwiseAbs().maxCoeff());
  const double gap = (loss + r.q).cwiseAbs().maxCoeff();
  if (!(gap <= kFixedPointTol * scale)) {
    throw ConsistencyError("inoperability fixed point disagrees with L * delta_f by " +
                           std::to_string(gap));
  }
  return r;
}

ExtractionSpec::ExtractionSpec(std::size_t target, Eigen::VectorXd alpha,
                               Eigen::VectorXd demand_change)
    : target_(target), alpha_(std::move(alpha)), demand_change_(std::move(demand_change)) {
  const auto n = static_cast<std::size_t>(alpha_.size());
  if (target_ >= n) throw PreconditionError("extraction target out of range");
  require_same_size(demand_change_, n, "final demand change");
  for (Eigen::Index j = 0; j < alpha_.size(); ++j) {
    if (!(alpha_(j) >= 0.0 && alpha_(j) <= 1.0)) {
      throw PreconditionError("extraction intensity " + std::to_string(alpha_(j)) +
                              " for sector " + std::to_string(j) + " outside [0, 1]");
    }
  }
}

ExtractionSpec ExtractionSpec::uniform(std::size_t target, double alpha, std::size_t n,
                                       Eigen::VectorXd demand_change) {
  return ExtractionSpec(target, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), alpha),
                        std::move(demand_change));
}

ExtractionSpec ExtractionSpec::from_scenario(const LeontiefModel& model, const ScenarioSpec& spec,
                                             const DemandDelta& delta) {
  return ExtractionSpec(delta.target, extraction_intensities(model.table(), spec), delta.delta_f);
}

Eigen::RowVectorXd ExtractionSpec::b_k(const Eigen::MatrixXd& A) const {
  Eigen::RowVectorXd row = A.row(static_cast<Eigen::Index>(target_));
  row(static_cast<Eigen::Index>(target_)) = 0.0;
  return row;
}

Eigen::MatrixXd ExtractionSpec::extracted_coefficients(const Eigen::MatrixXd& A) const {
  if (A.rows() != alpha_.size() || A.cols() != alpha_.size()) {
    throw PreconditionError("coefficient matrix does not match extraction spec");
  }
  Eigen::MatrixXd a_bar = A;
  const auto k = static_cast<Eigen::Index>(target_);
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    if (j == k) continue;
    a_bar(k, j) = A(k, j) * (1.0 - alpha_(j));
  }
  return a_bar;
}

ImpactResult partial_extraction(const LeontiefModel& model, const ExtractionSpec& spec,
                                const std::string& scenario) {
  require_same_size(spec.alpha(), model.size(), "alpha");
  const Eigen::MatrixXd a_bar = spec.extracted_coefficients(model.A());
  return make_result(model, Method::extraction,
                     extraction_change(model, a_bar, spec.demand_change()), scenario);
}

ImpactResult full_extraction(const LeontiefModel& model, std::size_t k,
                             const std::string& scenario) {
  return full_extraction(model, k, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.size())),
                         scenario);
}

ImpactResult full_extraction(const LeontiefModel& model, std::size_t k,
                             Eigen::VectorXd final_demand_change, const std::string& scenario) {
  if (model.size() <= 1) {
    throw StructuralError("empty economy: extracting the only sector leaves nothing");
  }
  if (k >= model.size()) throw PreconditionError("extraction target out of range");
  require_same_size(final_demand_change, model.size(), "final demand change");

  const auto ki = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd a_bar = model.A();
  a_bar.row(ki).setZero();
  a_bar.col(ki).setZero();
  final_demand_change(ki) = -model.table().final_demand_total()(ki);
  return make_result(model, Method::full_extraction,
                     extraction_change(model, a_bar, final_demand_change), scenario);
}

ImpactResult apply_blowup(ImpactResult result, double b) {
  if (!(b > 0.0)) throw PreconditionError("blowup factor must be positive");
  result.baseline *= b;
  result.dx *= b;
  for (auto& [kind, delta] : result.satellites) delta *= b;
  result.aggregates.output_change *= b;
  result.aggregates.total_output *= b;
  for (auto& [kind, total] : result.aggregates.satellite_change) total *= b;
  result.blowup_applied *= b;
  return result;
}

double blowup_from_ratios(const std::vector<double>& ratios,
                          const std::vector<double>& projection_growth) {
  if (ratios.empty()) throw PreconditionError("empty final-demand/GDP ratio history");
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) /
                      static_cast<double>(ratios.size());
  double b = 1.0;
  for (double g : projection_growth) b *= 1.0 + mean * g;
  return b;
}

double estimate_blowup_factor(const std::map<int, double>& final_demand_history,
                              const std::map<int, double>& gdp_growth) {
  if (final_demand_history.empty()) throw PreconditionError("empty final-demand history");
  std::vector<double> ratios;
  for (auto it = std::next(final_demand_history.begin()); it != final_demand_history.end(); ++it) {
    const auto prev = final_demand_history.find(it->first - 1);
    const auto growth = gdp_growth.find(it->first);
    if (prev == final_demand_history.end() || growth == gdp_growth.end()) continue;
    if (growth->second == 0.0 || prev->second == 0.0) continue;
    ratios.push_back((it->second / prev->second - 1.0) / growth->second);
  }
  if (ratios.size() < 2) {
    throw PreconditionError("need at least two final-demand/GDP ratio observations, got " +
                            std::to_string(ratios.size()));
  }
  const int last_year = final_demand_history.rbegin()->first;
  std::vector<double> projection;
  for (const auto& [year, g] : gdp_growth) {
    if (year > last_year) projection.push_back(g);
  }
  if (projection.empty()) throw PreconditionError("no GDP growth given for projection years");
  return blowup_from_ratios(ratios, projection);
}

ComparisonReport compare_methods(const ImpactResult& a, const ImpactResult& b,
                                 std::size_t top_k) {
  if (a.sectors != b.sectors) throw StructuralError("impact results cover different sector sets");

  ComparisonReport c;
  c.method_a = a.method;
  c.method_b = b.method;
  c.scenario = a.scenario == b.scenario ? a.scenario : a.scenario + " / " + b.scenario;
  c.sectors = a.sectors;
  c.dx_difference = a.dx - b.dx;
  c.q_difference = a.q - b.q;
  c.top_k = top_k;

  auto add = [&](std::string metric, double va, double vb) {
    c.aggregates.push_back({std::move(metric), va, vb, va - vb});
  };
  add("output_change", a.aggregates.output_change, b.aggregates.output_change);
  add("output_change_fraction", a.aggregates.output_change_fraction,
      b.aggregates.output_change_fraction);
  for (auto kind : {SatelliteKind::value_added, SatelliteKind::income, SatelliteKind::employment,
                    SatelliteKind::capital_formation}) {
    auto ia = a.aggregates.satellite_change.find(kind);
    auto ib = b.aggregates.satellite_change.find(kind);
    if (ia == a.aggregates.satellite_change.end() || ib == b.aggregates.satellite_change.end()) {
      continue;
    }
    add(std::string(satellite_name(kind)) + "_change", ia->second, ib->second);
  }

  const auto top_a = top_losses(a, top_k);
  const auto top_b = top_losses(b, top_k);
  const std::set<std::size_t> in_b(top_b.begin(), top_b.end());
  for (auto i : top_a) {
    if (in_b.count(i)) c.top_overlap.push_back(a.sectors[i]);
  }
  return c;
}

}  // namespace ioshock
