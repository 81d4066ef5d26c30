#include "ioshock/scenario.hpp"

#include <cmath>
#include <sstream>

#include "ioshock/error.hpp"

namespace ioshock {

namespace {

constexpr double kShareSumTol = 1e-9;

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

bool is_consumption(Component c) {
  return c == Component::household || c == Component::npish || c == Component::government;
}

}  // namespace

std::optional<double> default_component_ratio(Component c) noexcept {
  switch (c) {
    case Component::household:
    case Component::npish:
    case Component::government:
      return 1.0;
    case Component::gfcf:
    case Component::inventory:
      return 0.0;
    case Component::exports:
      return std::nullopt;
  }
  return std::nullopt;
}

double resolve_component_ratio(const ScenarioSpec& spec, Component c) {
  if (auto it = spec.component_ratios.find(c); it != spec.component_ratios.end()) return it->second;
  if (auto d = default_component_ratio(c)) return *d;
  throw ConfigError("scenario '" + spec.name + "' has no ratio for component " +
                    std::string(component_code(c)) + " and no default applies");
}

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.target_sector.empty()) throw ConfigError("scenario has no target sector");
  if (!in_unit_interval(spec.sub_service_drop)) {
    throw ConfigError("sub_service_drop " + fmt(spec.sub_service_drop) + " outside [0, 1]");
  }
  for (const auto& [c, r] : spec.component_ratios) {
    if (!in_unit_interval(r)) {
      throw ConfigError("ratio for " + std::string(component_code(c)) + " is " + fmt(r) +
                        ", outside [0, 1]");
    }
  }
  if (!(spec.blowup_factor > 0.0)) {
    throw ConfigError("blowup_factor must be positive, got " + fmt(spec.blowup_factor));
  }
  if (spec.reallocation) {
    const auto& re = *spec.reallocation;
    if (!in_unit_interval(re.savings_fraction)) {
      throw ConfigError("savings_fraction " + fmt(re.savings_fraction) + " outside [0, 1]");
    }
    if (re.savings_fraction < 1.0) {
      if (re.shares.empty()) throw ConfigError("reallocation has no shares");
      double sum = 0.0;
      for (const auto& [code, share] : re.shares) {
        if (share < 0.0) throw ConfigError("negative reallocation share for '" + code + "'");
        sum += share;
      }
      if (std::abs(sum - 1.0) > kShareSumTol) {
        throw ConfigError("reallocation shares sum to " + fmt(sum) + ", expected 1");
      }
    }
  }
  if (spec.intermediate) {
    const auto& ur = spec.intermediate->use_ratios;
    if (!in_unit_interval(ur.default_ratio)) {
      throw ConfigError("default use ratio " + fmt(ur.default_ratio) + " outside [0, 1]");
    }
    for (const auto& [code, r] : ur.by_sector) {
      if (!in_unit_interval(r)) {
        throw ConfigError("use ratio for '" + code + "' is " + fmt(r) + ", outside [0, 1]");
      }
    }
  }
}

DemandDelta build_scenario1(const IOTable& table, const ScenarioSpec& spec) {
  if (spec.reallocation && spec.reallocation->savings_fraction < 1.0) {
    throw ConfigError("scenario '" + spec.name +
                      "' reallocates spending; use build_scenario2");
  }
  validate_scenario(spec);

  DemandDelta d;
  d.target = table.index_of(spec.target_sector);
  d.delta_f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.size()));

  double consumption = 0.0;
  double total = 0.0;
  for (auto c : kComponents) {
    double change = 0.0;
    if (auto it = spec.absolute_changes.find(c); it != spec.absolute_changes.end()) {
      change = it->second;
    } else {
      change = -table.final_demand(d.target, c) * resolve_component_ratio(spec, c) *
               spec.sub_service_drop;
    }
    d.target_component_change[static_cast<std::size_t>(c)] = change;
    total += change;
    if (is_consumption(c)) consumption += change;
  }
  d.delta_f(static_cast<Eigen::Index>(d.target)) = total;
  d.target_final_demand = table.final_demand_total()(static_cast<Eigen::Index>(d.target));
  d.total_drop_fraction = d.target_final_demand != 0.0 ? total / d.target_final_demand : 0.0;
  d.consumption_drop = std::abs(consumption);
  return d;
}

DemandDelta build_scenario2(const IOTable& table, const ScenarioSpec& spec) {
  if (!spec.reallocation) {
    throw ConfigError("scenario '" + spec.name + "' has no reallocation block");
  }
  ScenarioSpec base = spec;
  base.reallocation.reset();
  validate_scenario(spec);
  DemandDelta d = build_scenario1(table, base);

  const auto& re = *spec.reallocation;
  const double pool = (1.0 - re.savings_fraction) * d.consumption_drop;
  if (re.shares.empty() || pool == 0.0) return d;

  std::vector<std::size_t> sectors;
  sectors.reserve(re.shares.size());
  for (const auto& [code, share] : re.shares) sectors.push_back(table.index_of(code));

  // The smallest share takes the residual so that the running sum of gains
  // lands exactly on the pool.
  std::size_t residual = 0;
  for (std::size_t i = 1; i < re.shares.size(); ++i) {
    if (re.shares[i].second <= re.shares[residual].second) residual = i;
  }
  double allocated = 0.0;
  for (std::size_t i = 0; i < re.shares.size(); ++i) {
    if (i == residual) continue;
    const double gain = pool * re.shares[i].second;
    d.gains.push_back({sectors[i], gain});
    allocated += gain;
  }
  d.gains.push_back({sectors[residual], pool - allocated});

  double total = 0.0;
  for (const auto& g : d.gains) {
    d.delta_f(static_cast<Eigen::Index>(g.sector)) += g.amount;
    total += g.amount;
  }
  d.reallocated_total = total;
  return d;
}

DemandDelta build_demand_delta(const IOTable& table, const ScenarioSpec& spec) {
  if (spec.reallocation && spec.reallocation->savings_fraction < 1.0) {
    return build_scenario2(table, spec);
  }
  ScenarioSpec base = spec;
  base.reallocation.reset();
  return build_scenario1(table, base);
}

Eigen::VectorXd extraction_intensities(const IOTable& table, const ScenarioSpec& spec) {
  validate_scenario(spec);
  const auto n = static_cast<Eigen::Index>(table.size());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  if (!spec.intermediate || !spec.intermediate->apply) return alpha;

  const auto& ur = spec.intermediate->use_ratios;
  alpha.setConstant(ur.default_ratio * spec.sub_service_drop);
  for (const auto& [code, r] : ur.by_sector) {
    alpha(static_cast<Eigen::Index>(table.index_of(code))) = r * spec.sub_service_drop;
  }
  return alpha;
}

}  // namespace ioshock
