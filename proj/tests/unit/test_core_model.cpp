#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "ioshock/error.hpp"
#include "ioshock/io_table.hpp"
#include "testkit/testkit.hpp"

using namespace ioshock;

namespace unit {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

IOTable with_output(const IOTable& t, Eigen::VectorXd x) {
  return IOTable(t.sectors(), t.flows(), t.final_demand(), t.imports(), t.value_added(),
                 t.satellites(), std::move(x));
}

IOTable with_flows(const IOTable& t, Eigen::MatrixXd z) {
  return IOTable(t.sectors(), std::move(z), t.final_demand(), t.imports(), t.value_added(),
                 t.satellites(), t.output());
}

}  // namespace unit

using unit::mat2;

TEST_CASE("validate_table accepts the two-sector economy") {
  const auto report = validate_table(testkit::canonical_e2());
  CHECK(report.passed);
  CHECK(report.violations.empty());
  CHECK(report.warnings.empty());
}

TEST_CASE("validate_table flags a perturbed output on sector 2") {
  const auto t = unit::with_output(testkit::canonical_e2(), Eigen::Vector2d(100, 101));
  const auto report = validate_table(t);
  CHECK_FALSE(report.passed);
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.kind == ViolationKind::row_identity && v.sector == 1) {
      found = true;
      CHECK(v.expected == doctest::Approx(100.0));
      CHECK(v.actual == doctest::Approx(101.0));
      CHECK(v.rel_error == doctest::Approx(1.0 / 101.0).epsilon(1e-12));
      CHECK(v.rel_error == doctest::Approx(0.0099).epsilon(0.01));
    }
    CHECK(v.sector == 1);
  }
  CHECK(found);
}

TEST_CASE("validate_table flags negative flows") {
  const auto t = unit::with_flows(testkit::canonical_e2(), mat2(50, -1, 30, 40));
  const auto report = validate_table(t, 1.0);  // identities aside, the sign alone must fail
  CHECK_FALSE(report.passed);
  bool negative = false;
  for (const auto& v : report.violations) {
    if (v.kind == ViolationKind::negative_flow) {
      negative = true;
      CHECK(v.sector == 0);
      CHECK(v.column == 1);
    }
  }
  CHECK(negative);
}

TEST_CASE("validate_table rejects a non-positive tolerance") {
  CHECK_THROWS_AS(validate_table(testkit::canonical_e2(), 0.0), PreconditionError);
}

TEST_CASE("validate_table is read-only") {
  const auto t = testkit::random_economy({.n = 6, .seed = 3});
  const IOTable copy = t;
  (void)validate_table(t);
  CHECK(t == copy);
}

TEST_CASE("negative inventory change is silent, other negative demand warns") {
  const auto base = testkit::canonical_e2();
  Eigen::MatrixXd f = base.final_demand();
  const auto inv = static_cast<Eigen::Index>(Component::inventory);
  const auto hh = static_cast<Eigen::Index>(Component::household);
  f(0, inv) = -5;
  f(0, hh) = 35;
  IOTable with_inv(base.sectors(), base.flows(), f, base.imports(), base.value_added(),
                   base.satellites(), base.output());
  auto report = validate_table(with_inv);
  CHECK(report.passed);
  CHECK(report.warnings.empty());

  f(0, inv) = 0;
  f(0, hh) = 40;
  f(0, static_cast<Eigen::Index>(Component::government)) = -10;
  IOTable with_gov(base.sectors(), base.flows(), f, base.imports(), base.value_added(),
                   base.satellites(), base.output());
  report = validate_table(with_gov);
  CHECK(report.passed);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].sector == 0);
}

TEST_CASE("income above value added is a warning only") {
  auto base = testkit::canonical_e2();
  SatelliteMap sat = base.satellites();
  sat[SatelliteKind::income] = Eigen::Vector2d(25, 25);  // VA_1 = 20
  IOTable t(base.sectors(), base.flows(), base.final_demand(), base.imports(), base.value_added(),
            sat, base.output());
  const auto report = validate_table(t);
  CHECK(report.passed);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].sector == 0);
}

TEST_CASE("negative employment is a violation") {
  auto base = testkit::canonical_e2();
  SatelliteMap sat = base.satellites();
  sat[SatelliteKind::employment] = Eigen::Vector2d(10, -1);
  IOTable t(base.sectors(), base.flows(), base.final_demand(), base.imports(), base.value_added(),
            sat, base.output());
  const auto report = validate_table(t);
  CHECK_FALSE(report.passed);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == ViolationKind::negative_employment);
}

TEST_CASE("structural errors are distinct from identity violations") {
  const auto e2 = testkit::canonical_e2();
  CHECK_THROWS_AS(IOTable(e2.sectors(), Eigen::MatrixXd::Zero(3, 3), e2.final_demand(),
                          e2.imports(), e2.value_added(), e2.satellites(), e2.output()),
                  StructuralError);
  SatelliteMap bad;
  bad.emplace(SatelliteKind::employment, Eigen::Vector3d(1, 2, 3));
  CHECK_THROWS_AS(IOTable(e2.sectors(), e2.flows(), e2.final_demand(), e2.imports(),
                          e2.value_added(), bad, e2.output()),
                  StructuralError);
  CHECK_THROWS_AS(IOTable({{"S1", "a", 0}, {"S1", "b", 1}}, e2.flows(), e2.final_demand(),
                          e2.imports(), e2.value_added(), {}, e2.output()),
                  StructuralError);
  CHECK_THROWS_AS(IOTable(e2.sectors(), e2.flows(), Eigen::MatrixXd::Zero(2, 5), e2.imports(),
                          e2.value_added(), {}, e2.output()),
                  StructuralError);
}

TEST_CASE("sector lookup") {
  const auto t = testkit::canonical_e2();
  CHECK(t.index_of("S2") == 1);
  CHECK_FALSE(t.find("S9").has_value());
  CHECK_THROWS_AS(t.index_of("S9"), StructuralError);
  CHECK(t.sector(1).index == 1);
}

TEST_CASE("value added doubles as a satellite") {
  const auto t = testkit::canonical_e2();
  REQUIRE(t.has_satellite(SatelliteKind::value_added));
  CHECK(t.satellite(SatelliteKind::value_added)(1) == 40.0);
  CHECK_FALSE(t.has_satellite(SatelliteKind::capital_formation));
  CHECK_THROWS_AS(t.satellite(SatelliteKind::capital_formation), PreconditionError);
}

TEST_CASE("drop_zero_sectors on a table without zero sectors is the identity") {
  const auto t = testkit::canonical_e2();
  const auto r = drop_zero_sectors(t);
  CHECK(r.dropped.empty());
  CHECK(r.table == t);
}

TEST_CASE("drop_zero_sectors removes the zero-output sector and re-indexes") {
  Eigen::MatrixXd z(3, 3);
  z << 10, 0, 20, 0, 0, 0, 5, 0, 15;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(3, kComponentCount);
  f(0, 0) = 70;
  f(2, 0) = 80;
  SatelliteMap sat;
  sat.emplace(SatelliteKind::employment, Eigen::Vector3d(3, 0, 7));
  IOTable t({{"A", "first", 0}, {"B", "empty", 1}, {"C", "third", 2}}, z, f,
            Eigen::Vector3d(5, 0, 5), Eigen::Vector3d(80, 0, 60), sat,
            Eigen::Vector3d(100, 0, 100));
  const auto r = drop_zero_sectors(t);
  REQUIRE(r.dropped.size() == 1);
  CHECK(r.dropped[0].code == "B");
  const auto& d = r.table;
  REQUIRE(d.size() == 2);
  CHECK(d.sector(1).code == "C");
  CHECK(d.sector(1).index == 1);
  CHECK(d.flows() == mat2(10, 20, 5, 15));
  CHECK(d.output() == Eigen::Vector2d(100, 100));
  CHECK(d.satellite(SatelliteKind::employment) == Eigen::Vector2d(3, 7));
  CHECK(d.final_demand_total() == Eigen::Vector2d(70, 80));
  CHECK(validate_table(d).passed);
}

TEST_CASE("drop_zero_sectors preserves retained pairwise flows exactly") {
  auto t = testkit::random_economy({.n = 7, .seed = 11});
  // Zero out sector 3 completely, then drop it.
  Eigen::MatrixXd z = t.flows();
  z.row(3).setZero();
  z.col(3).setZero();
  Eigen::VectorXd x = t.output();
  x(3) = 0;
  IOTable zeroed(t.sectors(), z, t.final_demand(), t.imports(), t.value_added(), t.satellites(), x);
  const auto r = drop_zero_sectors(zeroed);
  REQUIRE(r.table.size() == 6);
  const std::vector<Eigen::Index> keep{0, 1, 2, 4, 5, 6};
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) {
      CHECK(r.table.flows()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            z(keep[i], keep[j]));
    }
  }
  CHECK((r.table.output().array() > 0).all());
}
