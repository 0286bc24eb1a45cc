#include <doctest.h>

#include <cmath>

#include "../support/random_objects.hpp"
#include "chanorder/core.hpp"

using namespace chanorder;

namespace {

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

Channel bsc(double eps) {
  Matrix m(2, 2);
  m(0, 0) = m(1, 1) = 1 - eps;
  m(0, 1) = m(1, 0) = eps;
  return Channel(Alphabet::range(2), Alphabet::range(2), m);
}

}  // namespace

TEST_CASE("alphabets reject duplicates and find labels") {
  const Alphabet a({"x", "y"});
  CHECK(a.index("y") == 1);
  CHECK_FALSE(a.find("z"));
  CHECK_THROWS_AS(Alphabet({"x", "x"}), ValidationError);
}

TEST_CASE("probability vectors and channels are validated") {
  CHECK_THROWS(ProbVector(Alphabet::range(2), {0.5, 0.6}));
  CHECK_THROWS(ProbVector(Alphabet::range(2), {1.5, -0.5}));
  CHECK_THROWS_AS(ProbVector(Alphabet::range(3), {0.5, 0.5}), DimensionError);
  Matrix m(2, 2, 0.5);
  m(0, 0) = 0.7;
  CHECK_THROWS(Channel(Alphabet::range(2), Alphabet::range(2), m));
}

TEST_CASE("entropy closed forms") {
  CHECK(entropy(ProbVector::uniform(Alphabet::range(8))) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(entropy(ProbVector::point_mass(Alphabet::range(4), 2)) == 0.0);
  const std::vector<double> p{0.1, 0.9};
  CHECK(entropy(p) == doctest::Approx(h2(0.1)).epsilon(1e-14));
}

TEST_CASE("mutual information of the binary symmetric channel") {
  const auto uniform = ProbVector::uniform(Alphabet::range(2));
  for (double eps : {0.0, 0.1, 0.25, 0.5}) {
    const double expected = eps == 0.0 ? 1.0 : 1.0 - h2(eps);
    CHECK(std::abs(mutual_information(uniform, bsc(eps)) - expected) < 1e-12);
  }
}

TEST_CASE("compose multiplies stochastic matrices") {
  testing::RandomObjects rng(1);
  const Channel k = rng.channel(3, 4);
  const Channel l = rng.channel(4, 2);
  const Channel c = compose(l, k);
  CHECK(c.input() == k.input());
  CHECK(c.output() == l.output());
  CHECK(max_abs_difference(c.matrix(), multiply(l.matrix(), k.matrix())) == 0.0);
  CHECK(is_column_stochastic(c.matrix()));
  CHECK_THROWS_AS(compose(k, k), DimensionError);
}

TEST_CASE("joint marginals, channels and swapping") {
  testing::RandomObjects rng(2);
  const auto prior = rng.prior(3);
  const auto k1 = rng.channel(3, 2);
  const auto k2 = rng.channel(3, 4);
  const auto j = joint_from_channels(prior, k1, k2);
  CHECK(max_abs_difference(channel_from_joint(j, Output::x1).matrix(), k1.matrix()) < 1e-14);
  CHECK(max_abs_difference(channel_from_joint(j, Output::x2).matrix(), k2.matrix()) < 1e-14);
  for (std::size_t s = 0; s < 3; ++s) CHECK(std::abs(j.marginal_s()[s] - prior[s]) < 1e-15);
  const auto sw = j.swapped();
  CHECK(sw.x1() == j.x2());
  CHECK(sw(2, 3, 1) == j(2, 1, 3));
  // outputs are conditionally independent given S
  CHECK(std::abs(j(1, 0, 2) - prior[1] * k1(0, 1) * k2(2, 1)) < 1e-16);
}

TEST_CASE("conditional mutual information when X1 copies S and X2 is constant") {
  std::vector<double> m(4 * 4 * 1, 0.0);
  for (std::size_t s = 0; s < 4; ++s) m[s * 4 + s] = 0.25;
  const JointDistribution j(Alphabet::range(4), Alphabet::range(4), Alphabet::range(1), m);
  CHECK(conditional_mutual_information(j) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("channel of an unobserved state is undefined") {
  std::vector<double> m(8, 0.0);
  m[0] = 0.5;
  m[1] = 0.5;
  const JointDistribution j(Alphabet::range(2), Alphabet::range(2), Alphabet::range(2), m);
  CHECK_THROWS_AS(channel_from_joint(j, Output::x1), UndefinedColumnError);
  const auto r = restrict_to_support(j);
  CHECK(r.s().size() == 1);
}

TEST_CASE("coarse graining and its channels") {
  const CoarseGraining f(Alphabet::range(3), Alphabet::range(2), {0, 0, 1});
  const Channel d = deterministic_channel(f);
  CHECK(d(0, 1) == 1.0);
  CHECK(d(1, 2) == 1.0);
  CHECK(d(1, 0) == 0.0);
  CHECK_THROWS(CoarseGraining(Alphabet::range(3), Alphabet::range(2), {0, 0, 2}));
}
