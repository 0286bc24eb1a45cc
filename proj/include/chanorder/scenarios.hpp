#pragma once

// The worked examples and parameterized families, built from exact
// fractions, together with the values they are known to produce.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chanorder/blackwell.hpp"
#include "chanorder/core.hpp"
#include "chanorder/rational.hpp"

namespace chanorder {

// A family parameter outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

enum class Provenance {
  published,  // stated in the source
  derived,    // computed here from the published tables
};

const char* to_string(Provenance p);

struct ScenarioBundle;

struct ExpectedValue {
  std::string quantity;
  double value;
  Provenance provenance;
  // Re-derives the quantity from the bundle's own objects.
  std::function<double(const ScenarioBundle&)> recompute;
};

struct ScenarioBundle {
  std::string name;
  std::optional<JointDistribution> joint;
  std::map<std::string, Channel> channels;
  std::map<std::string, UtilityTable> utilities;
  std::optional<ProbVector> prior;
  std::optional<CoarseGraining> coarse_graining;
  std::vector<ExpectedValue> expected_values;

  // Throw ValidationError naming the missing entry.
  const Channel& channel(const std::string& key) const;
  const UtilityTable& utility(const std::string& key) const;
};

inline constexpr double kExpectedValueTolerance = 1e-9;
inline constexpr double kStructureTolerance = 1e-12;

struct ExpectedCheck {
  std::string quantity;
  double expected;
  double actual;
  Provenance provenance;
  bool pass;
};

std::vector<ExpectedCheck> check_expected_values(const ScenarioBundle& bundle,
                                                 double tolerance = kExpectedValueTolerance);

ScenarioBundle example_pregarbling();
ScenarioBundle example_and();
ScenarioBundle example_and_deterministic();

// -1/8 <= a <= 1/8, -1/16 <= b <= 1/16, every mass nonnegative.
ScenarioBundle family_and_grid(Rational a, Rational b);
// a, b >= 0, 0 < a + b <= 1.
ScenarioBundle family_and_deterministic(Rational a, Rational b);

// "pregarbling", "and", "and-deterministic", "and-grid(a,b)", "and-det(a,b)";
// parameters are fractions or decimals. Throws ValidationError for unknown
// names and DomainError for inadmissible parameters.
ScenarioBundle scenario_by_name(std::string_view name);

// The parameter-free scenarios.
std::vector<std::string> builtin_scenario_names();

// Building blocks shared with the tests.

// I(X1;X2) from the joint.
double output_dependence(const JointDistribution& j);
// Largest |P(x1, x2) - 1/|X1||X2||.
double deviation_from_uniform_outputs(const JointDistribution& j);
// Total mass on (s, x1, x2) with f(s) != AND(x1, x2); needs binary outputs.
double and_violation(const JointDistribution& j, const CoarseGraining& f);
// Total mass on (s, x2) with x2 != g(s).
double function_violation(const JointDistribution& j, Output which,
                          const std::vector<std::size_t>& g);
// Largest |P(t, x1) - P(t, x2)| over coarse symbols t.
double coarse_pair_difference(const JointDistribution& j, const CoarseGraining& f);
// P(s | x) as a channel S <- X; throws UndefinedColumnError when P(x) = 0.
Channel posterior_channel(const JointDistribution& j, Output which);
// H(S | X = x) in bits.
double conditional_entropy_at(const JointDistribution& j, Output which, std::size_t x);

}  // namespace chanorder
