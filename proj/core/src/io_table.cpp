#include "ioshock/io_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ioshock/error.hpp"

namespace ioshock {

namespace {

constexpr std::array<std::string_view, kComponentCount> kComponentCodes{"HH",  "NPISH", "GOV",
                                                                       "GFCF", "INV",   "EXP"};

double relative_error(double expected, double actual) {
  const double scale = std::max(std::abs(actual), std::abs(expected));
  if (scale == 0.0) return 0.0;
  return std::abs(actual - expected) / scale;
}

void require_length(const Eigen::VectorXd& v, std::size_t n, const std::string& what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw StructuralError(what + " has " + std::to_string(v.size()) + " entries, expected " +
                          std::to_string(n));
  }
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& keep) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(keep[i]);
  return out;
}

}  // namespace

std::string_view component_code(Component c) noexcept {
  return kComponentCodes[static_cast<std::size_t>(c)];
}

std::optional<Component> parse_component(std::string_view code) noexcept {
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    if (kComponentCodes[i] == code) return kComponents[i];
  }
  return std::nullopt;
}

std::string_view satellite_name(SatelliteKind kind) noexcept {
  switch (kind) {
    case SatelliteKind::income:
      return "income";
    case SatelliteKind::value_added:
      return "value_added";
    case SatelliteKind::employment:
      return "employment";
    case SatelliteKind::capital_formation:
      return "capital_formation";
  }
  return "unknown";
}

std::optional<SatelliteKind> parse_satellite_kind(std::string_view name) noexcept {
  for (auto kind : kSatelliteKinds) {
    if (satellite_name(kind) == name) return kind;
  }
  return std::nullopt;
}

IOTable::IOTable(std::vector<Sector> sectors, Eigen::MatrixXd flows, Eigen::MatrixXd final_demand,
                 Eigen::VectorXd imports, Eigen::VectorXd value_added, SatelliteMap satellites,
                 Eigen::VectorXd output)
    : sectors_(std::move(sectors)),
      flows_(std::move(flows)),
      final_demand_(std::move(final_demand)),
      imports_(std::move(imports)),
      value_added_(std::move(value_added)),
      satellites_(std::move(satellites)),
      output_(std::move(output)) {
  const std::size_t n = sectors_.size();
  const auto ni = static_cast<Eigen::Index>(n);

  std::set<std::string> codes;
  for (std::size_t i = 0; i < n; ++i) {
    sectors_[i].index = i;
    if (sectors_[i].code.empty()) {
      throw StructuralError("sector " + std::to_string(i) + " has an empty code");
    }
    if (!codes.insert(sectors_[i].code).second) {
      throw StructuralError("duplicate sector code '" + sectors_[i].code + "'");
    }
  }
  if (flows_.rows() != ni || flows_.cols() != ni) {
    throw StructuralError("flow matrix is " + std::to_string(flows_.rows()) + "x" +
                          std::to_string(flows_.cols()) + ", expected " + std::to_string(n) + "x" +
                          std::to_string(n));
  }
  if (final_demand_.rows() != ni ||
      final_demand_.cols() != static_cast<Eigen::Index>(kComponentCount)) {
    throw StructuralError("final demand block is " + std::to_string(final_demand_.rows()) + "x" +
                          std::to_string(final_demand_.cols()) + ", expected " +
                          std::to_string(n) + "x" + std::to_string(kComponentCount));
  }
  require_length(imports_, n, "imports row");
  require_length(value_added_, n, "value added row");
  require_length(output_, n, "output vector");
  for (const auto& [kind, values] : satellites_) {
    require_length(values, n, std::string(satellite_name(kind)) + " satellite");
  }
  satellites_.try_emplace(SatelliteKind::value_added, value_added_);
}

std::optional<std::size_t> IOTable::find(std::string_view code) const noexcept {
  for (const auto& s : sectors_) {
    if (s.code == code) return s.index;
  }
  return std::nullopt;
}

std::size_t IOTable::index_of(std::string_view code) const {
  if (auto i = find(code)) return *i;
  throw StructuralError("unknown sector code '" + std::string(code) + "'");
}

const Eigen::VectorXd& IOTable::satellite(SatelliteKind kind) const {
  auto it = satellites_.find(kind);
  if (it == satellites_.end()) {
    throw PreconditionError("table has no " + std::string(satellite_name(kind)) + " satellite");
  }
  return it->second;
}

bool operator==(const IOTable& a, const IOTable& b) {
  if (a.sectors_ != b.sectors_ || a.satellites_.size() != b.satellites_.size()) return false;
  for (const auto& [kind, values] : a.satellites_) {
    auto it = b.satellites_.find(kind);
    if (it == b.satellites_.end() || it->second != values) return false;
  }
  return a.flows_ == b.flows_ && a.final_demand_ == b.final_demand_ && a.imports_ == b.imports_ &&
         a.value_added_ == b.value_added_ && a.output_ == b.output_;
}

std::string_view violation_name(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::row_identity:
      return "row_identity";
    case ViolationKind::column_identity:
      return "column_identity";
    case ViolationKind::negative_flow:
      return "negative_flow";
    case ViolationKind::nonpositive_output:
      return "nonpositive_output";
    case ViolationKind::negative_employment:
      return "negative_employment";
  }
  return "unknown";
}

ValidationReport validate_table(const IOTable& table, double rel_tol) {
  if (!(rel_tol > 0.0)) throw PreconditionError("rel_tol must be positive");

  ValidationReport report;
  report.rel_tol = rel_tol;
  const auto n = static_cast<Eigen::Index>(table.size());
  const auto& z = table.flows();
  const auto& x = table.output();
  const auto& fd = table.final_demand();

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (z(i, j) < 0.0) {
        report.violations.push_back({ViolationKind::negative_flow, static_cast<std::size_t>(i),
                                     static_cast<std::size_t>(j), 0.0, z(i, j), 0.0});
      }
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (!(x(i) > 0.0)) {
      report.violations.push_back(
          {ViolationKind::nonpositive_output, si, si, 0.0, x(i), 0.0});
    }
    const double row_expected = z.row(i).sum() + fd.row(i).sum();
    const double row_err = relative_error(row_expected, x(i));
    if (row_err > rel_tol) {
      report.violations.push_back({ViolationKind::row_identity, si, si, row_expected, x(i), row_err});
    }
    const double col_expected = z.col(i).sum() + table.imports()(i) + table.value_added()(i);
    const double col_err = relative_error(col_expected, x(i));
    if (col_err > rel_tol) {
      report.violations.push_back(
          {ViolationKind::column_identity, si, si, col_expected, x(i), col_err});
    }

    for (auto c : kComponents) {
      if (c == Component::inventory) continue;
      const double v = fd(i, static_cast<Eigen::Index>(c));
      if (v < 0.0) {
        report.warnings.push_back(
            {si, "negative " + std::string(component_code(c)) + " final demand " +
                     std::to_string(v)});
      }
    }
  }

  if (table.has_satellite(SatelliteKind::employment)) {
    const auto& e = table.satellite(SatelliteKind::employment);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (e(i) < 0.0) {
        const auto si = static_cast<std::size_t>(i);
        report.violations.push_back({ViolationKind::negative_employment, si, si, 0.0, e(i), 0.0});
      }
    }
  }
  if (table.has_satellite(SatelliteKind::income)) {
    const auto& s = table.satellite(SatelliteKind::income);
    const auto& va = table.satellite(SatelliteKind::value_added);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (s(i) > va(i)) {
        report.warnings.push_back({static_cast<std::size_t>(i),
                                   "income " + std::to_string(s(i)) + " exceeds value added " +
                                       std::to_string(va(i))});
      }
    }
  }

  report.passed = report.violations.empty();
  return report;
}

DropResult drop_zero_sectors(const IOTable& table) {
  std::vector<Eigen::Index> keep;
  std::vector<Sector> retained;
  std::vector<Sector> dropped;
  for (const auto& s : table.sectors()) {
    if (table.output()(static_cast<Eigen::Index>(s.index)) > 0.0) {
      keep.push_back(static_cast<Eigen::Index>(s.index));
      retained.push_back(s);
    } else {
      dropped.push_back(s);
    }
  }
  if (dropped.empty()) return {table, {}};

  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd z(m, m);
  Eigen::MatrixXd fd(m, table.final_demand().cols());
  for (Eigen::Index a = 0; a < m; ++a) {
    fd.row(a) = table.final_demand().row(keep[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < m; ++b) {
      z(a, b) = table.flows()(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
    }
  }
  SatelliteMap satellites;
  for (const auto& [kind, values] : table.satellites()) satellites.emplace(kind, take(values, keep));

  return {IOTable(std::move(retained), std::move(z), std::move(fd), take(table.imports(), keep),
                  take(table.value_added(), keep), std::move(satellites),
                  take(table.output(), keep)),
          std::move(dropped)};
}

}  // namespace ioshock
