#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/random_objects.hpp"
#include "chanorder/scenarios.hpp"
#include "chanorder/ui.hpp"

using namespace chanorder;

namespace {

// Brute-force oracle values, frozen (grid density 60 or 200 plus pattern search).
constexpr double kAndX1MinusX2 = 0.197340395863;
constexpr double kAndX2MinusX1 = 0.541701333633;
constexpr double kLinearX1MinusX2 = 0.007202282023;
constexpr double kOracleSlack = 1e-8;

JointDistribution linear_joint() {
  std::vector<double> m;
  for (int i = 1; i <= 8; ++i) m.push_back(i / 36.0);
  return JointDistribution(Alphabet::range(2), Alphabet::range(2), Alphabet::range(2), m);
}

}  // namespace

TEST_CASE("solver agrees with frozen oracle values") {
  const auto a = *example_and().joint;
  const auto r1 = unique_information(a, Direction::x1_minus_x2);
  const auto r2 = unique_information(a, Direction::x2_minus_x1);
  CHECK(r1.converged);
  CHECK(r2.converged);
  CHECK(std::abs(r1.value - kAndX1MinusX2) < kOracleSlack);
  CHECK(std::abs(r2.value - kAndX2MinusX1) < kOracleSlack);

  const auto l = unique_information(linear_joint(), Direction::x1_minus_x2);
  CHECK(std::abs(l.value - kLinearX1MinusX2) < kOracleSlack);
  CHECK(unique_information(linear_joint(), Direction::x2_minus_x1).value < 1e-9);
}

TEST_CASE("oracle reproduces its frozen values") {
  const auto a = *example_and().joint;
  CHECK(std::abs(unique_information_oracle(a, Direction::x1_minus_x2, 60) - kAndX1MinusX2) < 1e-11);
  CHECK(std::abs(unique_information_oracle(linear_joint(), Direction::x1_minus_x2, 200) -
                 kLinearX1MinusX2) < 1e-11);
}

TEST_CASE("a deterministic second output pins the polytope to a point") {
  // X2 = g(S) leaves one coupling per state, so UI(S;X1\X2) = I(S;X1|X2).
  const auto j = *example_and_deterministic().joint;
  const auto r = unique_information(j, Direction::x1_minus_x2);
  CHECK(r.converged);
  CHECK(std::abs(r.value - conditional_mutual_information(j)) < 1e-12);
}

TEST_CASE("product joints have no unique information") {
  testing::RandomObjects rng(21);
  const auto prior = rng.prior(3);
  const auto c1 = Channel::constant(Alphabet::range(3), rng.prior(2));
  const auto c2 = Channel::constant(Alphabet::range(3), rng.prior(3));
  const auto j = joint_from_channels(prior, c1, c2);
  for (Direction d : {Direction::x1_minus_x2, Direction::x2_minus_x1}) {
    const auto r = unique_information(j, d);
    CHECK(r.converged);
    CHECK(r.value < 1e-12);
  }
}

TEST_CASE("solver matches the oracle on random 2x2x2 joints") {
  testing::RandomObjects rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto j = rng.joint(2, 2, 2, trial % 4 == 0 ? 0.3 : 0.0);
    for (Direction d : {Direction::x1_minus_x2, Direction::x2_minus_x1}) {
      const auto r = unique_information(j, d);
      CHECK(r.converged);
      CHECK(r.duality_gap <= kDefaultUITolerance);
      const double oracle = unique_information_oracle(j, d, 200);
      // the oracle is an upper bound on the minimum, value - gap a lower bound
      CHECK(r.value - r.duality_gap <= oracle + 1e-12);
      CHECK(std::abs(r.value - oracle) <= std::max(1e-7, 2 * r.duality_gap));
    }
  }
}

TEST_CASE("optimizer lies in the marginal polytope") {
  testing::RandomObjects rng(23);
  const auto j = rng.joint(3, 2, 3, 0.2);
  const auto r = unique_information(j, Direction::x1_minus_x2);
  CHECK(r.optimizer.constraint_violation(j) < 1e-10);
  const auto q = r.optimizer.joint(j);
  CHECK(std::abs(conditional_mutual_information(q) - r.value) < 1e-12);
  for (Output w : {Output::x1, Output::x2}) {
    CHECK(max_abs_difference(q.pair_marginal(w), j.pair_marginal(w)) < 1e-10);
  }
}

TEST_CASE("directions are exchanged by swapping outputs") {
  testing::RandomObjects rng(24);
  const auto j = rng.joint(3, 3, 2);
  const double a = unique_information(j, Direction::x1_minus_x2).value;
  const double b = unique_information(j.swapped(), Direction::x2_minus_x1).value;
  CHECK(std::abs(a - b) < 2 * kDefaultUITolerance);
}

TEST_CASE("observer sees every iterate and non-convergence is not an error") {
  std::size_t calls = 0;
  UIOptions opt;
  opt.tolerance = 1e-300;
  opt.max_iterations = 3;
  opt.observer = [&](const UIProgress& p) {
    CHECK(p.iteration == calls);
    CHECK(p.gap >= 0.0);
    ++calls;
  };
  const auto r = unique_information(*example_and().joint, Direction::x1_minus_x2, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(calls == 4);
  CHECK(r.value >= kAndX1MinusX2 - 1e-9);
}

TEST_CASE("transportation vertices of a 2x2 polytope") {
  const auto v = transportation_vertices({0.5, 0.5}, {0.25, 0.75});
  CHECK(v.size() == 2);
}

TEST_CASE("oracle refuses large polytopes") {
  testing::RandomObjects rng(25);
  const auto j = rng.joint(3, 3, 3);
  CHECK_THROWS_AS(unique_information_oracle(j, Direction::x1_minus_x2, 10), DimensionError);
}

TEST_CASE("equivalence check on ordered and unordered joints") {
  testing::RandomObjects rng(26);
  const auto prior = rng.prior(3);
  const auto k1 = rng.channel(3, 3);
  const auto k2 = compose(rng.channel(3, 2), k1);
  const auto ordered = joint_from_channels(prior, k1, k2);
  const auto rep = ui_blackwell_equivalence_check(ordered, Direction::x2_minus_x1, 1e-6);
  CHECK(rep.witness);
  CHECK(rep.ui_vanishes);
  CHECK(rep.agree);
  const auto and_rep = ui_blackwell_equivalence_check(*example_and().joint, Direction::x1_minus_x2, 1e-6);
  CHECK_FALSE(and_rep.witness);
  CHECK_FALSE(and_rep.ui_vanishes);
  CHECK(and_rep.agree);
}
