#include <doctest.h>

#include <cmath>

#include "chanorder/scenarios.hpp"
#include "chanorder/ui.hpp"

using namespace chanorder;

TEST_CASE("every built-in scenario re-derives its expected values") {
  for (const auto& name : builtin_scenario_names()) {
    const auto b = scenario_by_name(name);
    CHECK(b.name == name);
    CHECK_FALSE(b.expected_values.empty());
    for (const auto& c : check_expected_values(b)) {
      INFO(name, ": ", c.quantity);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("unknown scenarios are reported") {
  CHECK_THROWS(scenario_by_name("nonesuch"));
}

TEST_CASE("and-grid family at the origin is the AND example") {
  const auto g = family_and_grid(Rational(0), Rational(0));
  CHECK(max_abs_difference(g.channel("x1_given_s").matrix(),
                           example_and().channel("x1_given_s").matrix()) < 1e-15);
}

TEST_CASE("and-grid corner reproduces the AND example") {
  const auto corner = *family_and_grid(Rational(-1, 8), Rational(1, 16)).joint;
  const auto base = *example_and().joint;
  const double a = unique_information(corner, Direction::x1_minus_x2).value;
  const double b = unique_information(base, Direction::x1_minus_x2).value;
  CHECK(std::abs(a - b) < 2 * kDefaultUITolerance);
}

TEST_CASE("families reject parameters outside their range") {
  CHECK_THROWS_AS(family_and_grid(Rational(1, 4), Rational(0)), DomainError);
  CHECK_THROWS_AS(family_and_deterministic(Rational(3, 4), Rational(1, 2)), DomainError);
  CHECK_NOTHROW(family_and_deterministic(Rational(1, 3), Rational(1, 3)));
}

TEST_CASE("and-det family at one third recovers the deterministic example") {
  const auto f = *family_and_deterministic(Rational(1, 3), Rational(1, 3)).joint;
  const auto e = *example_and_deterministic().joint;
  for (std::size_t k = 0; k < f.mass().size(); ++k) CHECK(std::abs(f.mass()[k] - e.mass()[k]) < 1e-15);
}

TEST_CASE("scenario names accept parameters") {
  const auto b = scenario_by_name("and-grid(1/32, 1/64)");
  REQUIRE(b.joint);
  CHECK(unique_information(*b.joint, Direction::x1_minus_x2).value < 1e-5);
}

TEST_CASE("posterior channel and conditional entropies of the AND example") {
  const auto j = *example_and().joint;
  CHECK(std::abs(conditional_entropy_at(j, Output::x1, 0) - 1.0) < 1e-12);
  CHECK(std::abs(conditional_entropy_at(j, Output::x2, 0) - (2.0 - 0.75 * std::log2(3.0))) < 1e-12);
  const auto post = posterior_channel(j, Output::x1);
  CHECK(post.input() == j.x1());
  CHECK(post.output() == j.s());
}
