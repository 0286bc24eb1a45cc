#pragma once

// The Blackwell (degradation) order between channels with a common input:
// garbling tests through LP feasibility, decision problems, and separating
// utilities extracted from infeasibility certificates. Also the
// coarse-graining constructions (Markov approximation, pre-garbling by f).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "chanorder/core.hpp"
#include "chanorder/lp.hpp"

namespace chanorder {

// A separating problem failed re-verification.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// A precondition of the comparison itself (not of the inputs' shapes) failed.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Payoff u(s, a) for every (state, action) pair.
class UtilityTable {
 public:
  UtilityTable(Alphabet states, Alphabet actions, Matrix payoff);

  const Alphabet& states() const { return states_; }
  const Alphabet& actions() const { return actions_; }
  const Matrix& payoff() const { return payoff_; }
  double operator()(std::size_t s, std::size_t a) const { return payoff_(s, a); }

  bool operator==(const UtilityTable&) const = default;

 private:
  Alphabet states_;
  Alphabet actions_;
  Matrix payoff_;
};

struct DecisionSolution {
  // Chosen action index per observation symbol.
  std::vector<std::size_t> rule;
  // More than one action attains the optimum at this observation.
  std::vector<bool> tie;
  // Observation has positive probability.
  std::vector<bool> reachable;
  double expected_utility = 0.0;
};

// Optimal deterministic rule; ties go to the first action in label order.
// Unreachable observations map to the first action and contribute nothing.
DecisionSolution solve_decision(const Channel& kappa, const ProbVector& prior,
                                const UtilityTable& u);

double evaluate_rule(const Channel& kappa, const ProbVector& prior, const UtilityTable& u,
                     std::span<const std::size_t> rule);

struct DecisionProblem {
  UtilityTable utility;
  ProbVector prior;
};

struct SeparatingProblem {
  DecisionProblem problem;
  double better_utility = 0.0;
  double worse_utility = 0.0;
  double gap() const { return better_utility - worse_utility; }
};

inline constexpr double kSeparationGap = 1e-9;

// Evaluates both channels under `problem`; the result has gap() > 0 iff
// `better` strictly wins.
SeparatingProblem evaluate_separation(const DecisionProblem& problem, const Channel& better,
                                      const Channel& worse);

// The system k1 = lambda . k2 over column-stochastic lambda. Variables are
// lambda(i, j) at index i * |out(k2)| + j; equalities are the |out(k1)| x |in|
// product constraints (row-major) followed by the |out(k2)| column sums.
FeasibilityProblem garbling_problem(const Channel& k1, const Channel& k2);

// lambda with k1 = lambda . k2 (to 1e-8 entrywise), or nullopt.
std::optional<Channel> test_garbling(const Channel& k1, const Channel& k2);

// Given a certificate that garbling_problem(better, worse) is infeasible,
// builds a utility table (actions = outputs of `better`) under which
// `better` strictly outperforms `worse` for `prior`. Falls back to a search
// over small integer payoff tables when the direct construction does not
// verify. Throws IntegrityError if nothing verifies.
SeparatingProblem separating_utility_from_certificate(std::span<const double> certificate,
                                                      const Channel& better, const Channel& worse,
                                                      const ProbVector& prior);

enum class Relation { inferior, superior, equivalent, incomparable };

const char* to_string(Relation r);

struct GarblingVerdict {
  Relation relation;
  // k1 = witness_forward . k2
  std::optional<Channel> witness_forward;
  // k2 = witness_backward . k1
  std::optional<Channel> witness_backward;
  // Present when k1 is not a garbling of k2: a problem where k1 wins.
  std::optional<SeparatingProblem> favoring_first;
  // Present when k2 is not a garbling of k1: a problem where k2 wins.
  std::optional<SeparatingProblem> favoring_second;
};

// Requires a full-support prior (separation by utility alone needs every
// state to occur).
GarblingVerdict compare(const Channel& k1, const Channel& k2, const ProbVector& prior);

// (X <- f(S)) . (f(S) <- S)
Channel markov_approximation(const JointDistribution& j, Output which, const CoarseGraining& f);

// lambda^f with columns P(. | f(S) = f(s)), a square channel on S.
Channel coarse_graining_pregarbler(const ProbVector& prior, const CoarseGraining& f);
Channel coarse_graining_pregarbler(const JointDistribution& j, const CoarseGraining& f);

// Keeps the symbol with probability 1 - eps, otherwise moves uniformly to
// one of the others. On two symbols this is the binary symmetric channel.
Channel symmetric_channel(const Alphabet& alphabet, double eps);

inline constexpr double kDefaultNoise = 0.01;

// symmetric_channel(out(kappa), eps) . kappa
Channel add_symmetric_noise(const Channel& kappa, double eps = kDefaultNoise);

}  // namespace chanorder
