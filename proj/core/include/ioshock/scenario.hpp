#pragma once

// Declarative demand shocks: final-demand deltas and per-purchaser extraction
// intensities for a single shocked sector.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ioshock/io_table.hpp"

namespace ioshock {

/// Share r_j of each purchasing sector's use of the target product that is
/// attributable to the shocked sub-service. Sectors absent from the map use
/// default_ratio.
struct UseRatios {
  std::map<std::string, double> by_sector;
  double default_ratio = 0.0;
};

struct Reallocation {
  /// Fraction of the freed final-consumption spending that is saved.
  double savings_fraction = 1.0;
  /// Sector code -> share of the reallocated pool. Must sum to one.
  std::vector<std::pair<std::string, double>> shares;
};

struct IntermediateShock {
  bool apply = true;
  UseRatios use_ratios;
};

struct ScenarioSpec {
  std::string name;
  std::string target_sector;
  /// Fractional drop alpha of the shocked sub-service, in [0, 1].
  double sub_service_drop = 0.0;
  /// Sub-service share per final-demand component. Missing entries fall back
  /// to default_component_ratio.
  std::map<Component, double> component_ratios;
  /// Absolute change (currency millions, negative = loss) overriding the
  /// ratio rule for a component.
  std::map<Component, double> absolute_changes;
  std::optional<Reallocation> reallocation;
  std::optional<IntermediateShock> intermediate;
  double blowup_factor = 1.0;
};

/// Consumption-like components (HH, NPISH, GOV) default to 1.0 and capital
/// formation (GFCF, INV) to 0.0. Exports have no default.
std::optional<double> default_component_ratio(Component c) noexcept;

/// Ratio actually applied to component c; throws ConfigError when the spec
/// leaves it unset and there is no default.
double resolve_component_ratio(const ScenarioSpec& spec, Component c);

/// Range and share-sum checks independent of any table. Throws ConfigError.
void validate_scenario(const ScenarioSpec& spec);

struct ReallocatedGain {
  std::size_t sector;
  double amount;
};

struct DemandDelta {
  std::size_t target = 0;
  /// Per-sector change in final demand, negative = loss.
  Eigen::VectorXd delta_f;
  /// Change per component for the target sector.
  std::array<double, kComponentCount> target_component_change{};
  /// Target sector's baseline total final demand.
  double target_final_demand = 0.0;
  /// sum(target_component_change) / target_final_demand.
  double total_drop_fraction = 0.0;
  /// |HH + NPISH + GOV change| for the target sector.
  double consumption_drop = 0.0;
  /// Gains in allocation order; their running sum is reallocated_total.
  std::vector<ReallocatedGain> gains;
  double reallocated_total = 0.0;
};

/// Target-sector drop only; every freed unit of spending is saved.
DemandDelta build_scenario1(const IOTable& table, const ScenarioSpec& spec);

/// Scenario 1 plus reallocation of (1 - savings_fraction) of the final
/// consumption drop. Exports and capital formation are never reallocated.
DemandDelta build_scenario2(const IOTable& table, const ScenarioSpec& spec);

/// Dispatches on whether the spec carries a reallocation with savings < 1.
DemandDelta build_demand_delta(const IOTable& table, const ScenarioSpec& spec);

/// alpha_j = r_j * alpha for every purchasing sector j. All zero when the spec
/// has no intermediate shock or it is disabled.
Eigen::VectorXd extraction_intensities(const IOTable& table, const ScenarioSpec& spec);

}  // namespace ioshock
