#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "ioshock/error.hpp"
#include "ioshock/scenario.hpp"
#include "testkit/testkit.hpp"

using namespace ioshock;

namespace {

ScenarioSpec e2_spec(double alpha) {
  ScenarioSpec s;
  s.name = "e2";
  s.target_sector = "S1";
  s.sub_service_drop = alpha;
  s.component_ratios[Component::household] = 1.0;
  s.component_ratios[Component::exports] = 0.0;
  return s;
}

// A six-sector table whose target has every final-demand component populated.
IOTable demand_table() {
  testkit::EconomyGenSpec g;
  g.n = 6;
  g.seed = 77;
  return testkit::random_economy(g);
}

}  // namespace

TEST_CASE("scenario 1 on the two-sector economy") {
  const auto d = build_scenario1(testkit::canonical_e2(), e2_spec(0.4));
  CHECK(d.target == 0);
  CHECK(d.delta_f(0) == doctest::Approx(-12.0).epsilon(1e-15));
  CHECK(d.delta_f(1) == 0.0);
  CHECK(d.target_component_change[static_cast<std::size_t>(Component::household)] ==
        doctest::Approx(-12.0));
  CHECK(d.total_drop_fraction == doctest::Approx(-0.4));
  CHECK(d.consumption_drop == doctest::Approx(12.0));
}

TEST_CASE("zero drop yields zero demand change") {
  const auto d = build_scenario1(testkit::canonical_e2(), e2_spec(0.0));
  CHECK(d.delta_f.isZero(0));
}

TEST_CASE("component changes follow value times ratio times drop") {
  const auto t = demand_table();
  ScenarioSpec s;
  s.name = "components";
  s.target_sector = "S3";
  s.sub_service_drop = 0.74;
  s.component_ratios[Component::exports] = 0.93;
  const auto d = build_scenario1(t, s);
  const std::array<double, kComponentCount> ratio{1.0, 1.0, 1.0, 0.0, 0.0, 0.93};
  double total = 0.0;
  for (auto c : kComponents) {
    const auto ci = static_cast<std::size_t>(c);
    const double expected = -t.final_demand(2, c) * ratio[ci] * 0.74;
    CHECK(d.target_component_change[ci] == doctest::Approx(expected).epsilon(1e-14));
    total += expected;
  }
  CHECK(d.delta_f(2) == doctest::Approx(total).epsilon(1e-14));
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (i != 2) CHECK(d.delta_f(i) == 0.0);
  }
  CHECK(d.total_drop_fraction == doctest::Approx(total / t.final_demand_total()(2)));
}

TEST_CASE("absolute component changes override ratios") {
  auto s = e2_spec(0.4);
  s.absolute_changes[Component::household] = -7.5;
  const auto d = build_scenario1(testkit::canonical_e2(), s);
  CHECK(d.delta_f(0) == -7.5);
}

TEST_CASE("missing export ratio is a configuration error") {
  ScenarioSpec s = e2_spec(0.4);
  s.component_ratios.erase(Component::exports);
  CHECK_THROWS_AS(build_scenario1(testkit::canonical_e2(), s), ConfigError);
  CHECK(default_component_ratio(Component::household) == 1.0);
  CHECK(default_component_ratio(Component::gfcf) == 0.0);
  CHECK_FALSE(default_component_ratio(Component::exports).has_value());
}

TEST_CASE("scenario 2 on the two-sector economy") {
  auto s = e2_spec(0.4);
  s.reallocation = Reallocation{0.5, {{"S2", 1.0}}};
  const auto d = build_scenario2(testkit::canonical_e2(), s);
  CHECK(d.delta_f(0) == doctest::Approx(-12.0));
  CHECK(d.delta_f(1) == doctest::Approx(6.0));
  REQUIRE(d.gains.size() == 1);
  CHECK(d.gains[0].sector == 1);
  CHECK(d.reallocated_total == doctest::Approx(6.0));
}

TEST_CASE("savings fraction one reproduces scenario 1") {
  auto s = e2_spec(0.4);
  s.reallocation = Reallocation{1.0, {{"S2", 1.0}}};
  const auto d2 = build_scenario2(testkit::canonical_e2(), s);
  const auto d1 = build_scenario1(testkit::canonical_e2(), e2_spec(0.4));
  CHECK(d2.delta_f == d1.delta_f);
  CHECK(d2.gains.empty());
  CHECK(build_demand_delta(testkit::canonical_e2(), s).delta_f == d1.delta_f);
}

TEST_CASE("scenario 2 reallocates only final consumption") {
  const auto t = demand_table();
  ScenarioSpec s;
  s.name = "realloc";
  s.target_sector = "S1";
  s.sub_service_drop = 0.74;
  s.component_ratios[Component::exports] = 0.93;
  s.reallocation = Reallocation{0.5, {{"S2", 0.2}, {"S4", 0.3}, {"S5", 0.5}}};
  const auto d = build_scenario2(t, s);
  double consumption = 0.0;
  for (auto c : {Component::household, Component::npish, Component::government}) {
    consumption += t.final_demand(0, c) * 0.74;
  }
  CHECK(d.consumption_drop == doctest::Approx(consumption).epsilon(1e-14));
  CHECK(d.delta_f(1) == doctest::Approx(0.5 * consumption * 0.2).epsilon(1e-14));
  CHECK(d.delta_f(3) == doctest::Approx(0.5 * consumption * 0.3).epsilon(1e-14));
  CHECK(d.delta_f(4) == doctest::Approx(0.5 * consumption * 0.5).epsilon(1e-14));
  CHECK(d.delta_f(2) == 0.0);
  CHECK(d.delta_f(5) == 0.0);
}

TEST_CASE("scenario 2 conservation and dominance over random tables") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    testkit::EconomyGenSpec g;
    g.n = 12;
    g.seed = seed;
    const auto t = testkit::random_economy(g);
    const auto shares = testkit::random_vector(5, seed + 1000, 0.01, 1.0);
    const double savings = testkit::random_vector(1, seed + 2000, 0.0, 0.95)(0);
    ScenarioSpec s;
    s.name = "random";
    s.target_sector = "S1";
    s.sub_service_drop = testkit::random_vector(1, seed + 3000, 0.0, 1.0)(0);
    s.component_ratios[Component::exports] = 0.5;
    Reallocation r{savings, {}};
    // Shares normalized so they sum to 1 within the validation tolerance.
    const double total = shares.sum();
    for (Eigen::Index i = 0; i < shares.size(); ++i) {
      r.shares.emplace_back("S" + std::to_string(i + 3), shares(i) / total);
    }
    s.reallocation = r;
    const auto d2 = build_scenario2(t, s);
    const double pool = (1.0 - savings) * d2.consumption_drop;
    double running = 0.0;
    for (const auto& gain : d2.gains) running += gain.amount;
    CHECK(running == pool);
    CHECK(d2.reallocated_total == pool);

    ScenarioSpec s1 = s;
    s1.reallocation.reset();
    const auto d1 = build_scenario1(t, s1);
    CHECK(((d2.delta_f - d1.delta_f).array() >= 0.0).all());
  }
}

TEST_CASE("reallocation validation") {
  auto s = e2_spec(0.4);
  s.reallocation = Reallocation{0.5, {{"S1", 0.5}, {"S2", 0.45}}};
  try {
    validate_scenario(s);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("0.95") != std::string::npos);
  }
  s.reallocation = Reallocation{0.5, {{"S9", 1.0}}};
  CHECK_THROWS_AS(build_scenario2(testkit::canonical_e2(), s), StructuralError);
  s = e2_spec(1.5);
  CHECK_THROWS_AS(validate_scenario(s), ConfigError);
  CHECK_THROWS_AS(build_scenario2(testkit::canonical_e2(), e2_spec(0.4)), ConfigError);
}

TEST_CASE("extraction intensities") {
  auto s = e2_spec(0.74);
  CHECK(extraction_intensities(testkit::canonical_e2(), s).isZero(0));
  s.intermediate = IntermediateShock{true, UseRatios{{{"S2", 0.07}}, 0.0}};
  auto a = extraction_intensities(testkit::canonical_e2(), s);
  CHECK(a(0) == 0.0);
  CHECK(a(1) == doctest::Approx(0.0518).epsilon(1e-12));
  s.intermediate->use_ratios.by_sector["S2"] = 1.0;
  a = extraction_intensities(testkit::canonical_e2(), s);
  CHECK(a(1) == doctest::Approx(0.74));
  s.intermediate->use_ratios.by_sector["S2"] = 1.2;
  CHECK_THROWS_AS(extraction_intensities(testkit::canonical_e2(), s), ConfigError);
  s.intermediate->use_ratios.by_sector = {{"S2", 0.0}};
  s.intermediate->use_ratios.default_ratio = 0.5;
  a = extraction_intensities(testkit::canonical_e2(), s);
  CHECK(a(0) == doctest::Approx(0.37));
  CHECK(a(1) == 0.0);
  s.intermediate->apply = false;
  CHECK(extraction_intensities(testkit::canonical_e2(), s).isZero(0));
}

TEST_CASE("scenario construction leaves the table untouched") {
  const auto t = testkit::canonical_e2();
  const IOTable copy = t;
  auto s = e2_spec(0.4);
  s.reallocation = Reallocation{0.5, {{"S2", 1.0}}};
  (void)build_demand_delta(t, s);
  CHECK(t == copy);
}
