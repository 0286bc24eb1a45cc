#include "chanorder/blackwell.hpp"

#include <algorithm>
#include <cmath>

namespace chanorder {

namespace {

constexpr double kTieTolerance = 1e-12;

void require_same_input(const Channel& a, const Channel& b) {
  if (!(a.input() == b.input())) throw DimensionError("channels have different input alphabets");
}

// Searches payoff tables with entries in {-1, 0, 1, 2} in lexicographic
// order for the first one that separates. Only for tiny alphabets.
std::optional<SeparatingProblem> search_vertex_utilities(const Channel& better,
                                                         const Channel& worse,
                                                         const ProbVector& prior) {
  const std::size_t ns = better.input().size();
  const std::size_t na = better.output().size();
  if (ns > 3 || ns * na > 9) return std::nullopt;
  static constexpr double kValues[] = {-1.0, 0.0, 1.0, 2.0};
  const std::size_t cells = ns * na;
  std::vector<std::size_t> digits(cells, 0);
  while (true) {
    Matrix payoff(ns, na);
    for (std::size_t c = 0; c < cells; ++c) payoff(c / na, c % na) = kValues[digits[c]];
    DecisionProblem problem{UtilityTable(better.input(), better.output(), std::move(payoff)), prior};
    SeparatingProblem sep = evaluate_separation(problem, better, worse);
    if (sep.gap() > kSeparationGap) return sep;
    std::size_t k = 0;
    while (k < cells && ++digits[k] == 4) digits[k++] = 0;
    if (k == cells) return std::nullopt;
  }
}

}  // namespace

UtilityTable::UtilityTable(Alphabet states, Alphabet actions, Matrix payoff)
    : states_(std::move(states)), actions_(std::move(actions)), payoff_(std::move(payoff)) {
  if (payoff_.rows() != states_.size() || payoff_.cols() != actions_.size()) {
    throw DimensionError("utility table shape does not match its alphabets");
  }
  for (double v : payoff_.data()) {
    if (!std::isfinite(v)) throw ValidationError("utility table has a non-finite payoff");
  }
}

DecisionSolution solve_decision(const Channel& kappa, const ProbVector& prior,
                                const UtilityTable& u) {
  if (!(prior.alphabet() == kappa.input())) {
    throw DimensionError("decision: prior alphabet differs from channel input");
  }
  if (!(u.states() == kappa.input())) {
    throw DimensionError("decision: utility states differ from channel input");
  }
  const std::size_t nx = kappa.output().size(), ns = prior.size(), na = u.actions().size();
  DecisionSolution sol;
  sol.rule.assign(nx, 0);
  sol.tie.assign(nx, false);
  sol.reachable.assign(nx, false);
  std::vector<double> score(na);
  for (std::size_t x = 0; x < nx; ++x) {
    double px = 0.0;
    for (std::size_t s = 0; s < ns; ++s) px += prior[s] * kappa(x, s);
    if (px <= 0.0) continue;
    sol.reachable[x] = true;
    // score(a) = sum_s P(s, x) u(s, a); the argmax agrees with the
    // posterior-weighted one since P(x) > 0 is a common factor.
    std::fill(score.begin(), score.end(), 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      const double psx = prior[s] * kappa(x, s);
      if (psx == 0.0) continue;
      for (std::size_t a = 0; a < na; ++a) score[a] += psx * u(s, a);
    }
    const double best = *std::max_element(score.begin(), score.end());
    std::size_t chosen = na;
    std::size_t count = 0;
    for (std::size_t a = 0; a < na; ++a) {
      if (score[a] >= best - kTieTolerance) {
        if (chosen == na) chosen = a;
        ++count;
      }
    }
    sol.rule[x] = chosen;
    sol.tie[x] = count > 1;
    sol.expected_utility += score[chosen];
  }
  return sol;
}

double evaluate_rule(const Channel& kappa, const ProbVector& prior, const UtilityTable& u,
                     std::span<const std::size_t> rule) {
  if (rule.size() != kappa.output().size()) throw DimensionError("rule is not total");
  double total = 0.0;
  for (std::size_t x = 0; x < rule.size(); ++x)
    for (std::size_t s = 0; s < prior.size(); ++s) total += prior[s] * kappa(x, s) * u(s, rule[x]);
  return total;
}

SeparatingProblem evaluate_separation(const DecisionProblem& problem, const Channel& better,
                                      const Channel& worse) {
  SeparatingProblem sep{problem, 0.0, 0.0};
  sep.better_utility = solve_decision(better, problem.prior, problem.utility).expected_utility;
  sep.worse_utility = solve_decision(worse, problem.prior, problem.utility).expected_utility;
  return sep;
}

FeasibilityProblem garbling_problem(const Channel& k1, const Channel& k2) {
  require_same_input(k1, k2);
  const std::size_t m1 = k1.output().size(), m2 = k2.output().size(), n = k1.input().size();
  FeasibilityProblem p(m1 * m2);
  for (std::size_t i = 0; i < m1; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> row(m1 * m2, 0.0);
      for (std::size_t j = 0; j < m2; ++j) row[i * m2 + j] = k2(j, k);
      p.add_equality(std::move(row), k1(i, k));
    }
  }
  for (std::size_t j = 0; j < m2; ++j) {
    std::vector<double> row(m1 * m2, 0.0);
    for (std::size_t i = 0; i < m1; ++i) row[i * m2 + j] = 1.0;
    p.add_equality(std::move(row), 1.0);
  }
  return p;
}

std::optional<Channel> test_garbling(const Channel& k1, const Channel& k2) {
  const FeasibilityOutcome outcome = solve_feasibility(garbling_problem(k1, k2));
  if (outcome.status == FeasibilityStatus::infeasible) return std::nullopt;

  const std::size_t m1 = k1.output().size(), m2 = k2.output().size();
  Matrix lambda(m1, m2);
  for (std::size_t j = 0; j < m2; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < m1; ++i) total += outcome.witness[i * m2 + j];
    for (std::size_t i = 0; i < m1; ++i) lambda(i, j) = outcome.witness[i * m2 + j] / total;
  }
  Channel witness(k2.output(), k1.output(), std::move(lambda));
  if (max_abs_difference(multiply(witness.matrix(), k2.matrix()), k1.matrix()) >
      kFeasibilityTolerance) {
    throw IllConditionedError("garbling witness does not reproduce the channel");
  }
  return witness;
}

SeparatingProblem separating_utility_from_certificate(std::span<const double> certificate,
                                                      const Channel& better, const Channel& worse,
                                                      const ProbVector& prior) {
  if (!prior.has_full_support()) {
    throw PreconditionError("separating problem needs a full-support prior");
  }
  const FeasibilityProblem lp = garbling_problem(better, worse);
  if (!verify_certificate(lp, certificate)) {
    throw IntegrityError("certificate does not verify against the garbling system");
  }
  // The certificate's product block y(a, s) pairs output a of `better` with
  // input s. u(s, a) = y(a, s) / prior(s) makes the identity rule on
  // `better` earn y^T b, while any rule on `worse` earns at most
  // -sum of the column-sum multipliers.
  const std::size_t na = better.output().size(), ns = better.input().size();
  double scale = 0.0;
  Matrix payoff(ns, na);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t s = 0; s < ns; ++s) {
      payoff(s, a) = certificate[a * ns + s] / prior[s];
      scale = std::max(scale, std::abs(payoff(s, a)));
    }
  if (scale > 0.0) {
    for (double& v : payoff.data()) v /= scale;
  }
  DecisionProblem direct{UtilityTable(better.input(), better.output(), std::move(payoff)), prior};
  SeparatingProblem sep = evaluate_separation(direct, better, worse);
  if (sep.gap() > kSeparationGap) return sep;

  if (auto found = search_vertex_utilities(better, worse, prior)) return *found;
  throw IntegrityError("no separating utility verified for an infeasible garbling system");
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::inferior: return "inferior";
    case Relation::superior: return "superior";
    case Relation::equivalent: return "equivalent";
    case Relation::incomparable: return "incomparable";
  }
  return "unknown";
}

GarblingVerdict compare(const Channel& k1, const Channel& k2, const ProbVector& prior) {
  require_same_input(k1, k2);
  if (!(prior.alphabet() == k1.input())) {
    throw DimensionError("compare: prior alphabet differs from channel input");
  }
  if (!prior.has_full_support()) {
    throw PreconditionError(
        "compare: the prior must give every input symbol positive probability; utility-only "
        "separation is not possible otherwise");
  }

  const FeasibilityOutcome forward = solve_feasibility(garbling_problem(k1, k2));
  const FeasibilityOutcome backward = solve_feasibility(garbling_problem(k2, k1));

  GarblingVerdict v{Relation::incomparable, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  if (forward.status == FeasibilityStatus::feasible) {
    v.witness_forward = test_garbling(k1, k2);
  } else {
    v.favoring_first = separating_utility_from_certificate(forward.certificate, k1, k2, prior);
  }
  if (backward.status == FeasibilityStatus::feasible) {
    v.witness_backward = test_garbling(k2, k1);
  } else {
    v.favoring_second = separating_utility_from_certificate(backward.certificate, k2, k1, prior);
  }

  const bool fwd = v.witness_forward.has_value(), bwd = v.witness_backward.has_value();
  if (fwd && bwd) {
    v.relation = Relation::equivalent;
  } else if (fwd) {
    v.relation = Relation::inferior;
  } else if (bwd) {
    v.relation = Relation::superior;
  }
  return v;
}

Channel markov_approximation(const JointDistribution& j, Output which, const CoarseGraining& f) {
  return compose(channel_from_joint(j, which, f), deterministic_channel(f));
}

Channel coarse_graining_pregarbler(const ProbVector& prior, const CoarseGraining& f) {
  if (!(f.domain() == prior.alphabet())) {
    throw DimensionError("coarse-graining domain differs from the prior alphabet");
  }
  const std::size_t ns = prior.size();
  std::vector<double> class_mass(f.codomain().size(), 0.0);
  for (std::size_t s = 0; s < ns; ++s) class_mass[f(s)] += prior[s];
  Matrix m(ns, ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const double pt = class_mass[f(s)];
    if (pt <= 0.0) {
      throw UndefinedColumnError("coarse symbol '" + f.codomain().label(f(s)) +
                                 "' has zero probability");
    }
    for (std::size_t sp = 0; sp < ns; ++sp) {
      if (f(sp) == f(s)) m(sp, s) = prior[sp] / pt;
    }
  }
  return Channel(prior.alphabet(), prior.alphabet(), std::move(m));
}

Channel coarse_graining_pregarbler(const JointDistribution& j, const CoarseGraining& f) {
  return coarse_graining_pregarbler(j.marginal_s(), f);
}

Channel symmetric_channel(const Alphabet& alphabet, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("noise level must lie in [0, 1]");
  const std::size_t n = alphabet.size();
  if (n == 1) return Channel::identity(alphabet);
  Matrix m(n, n, eps / static_cast<double>(n - 1));
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0 - eps;
  return Channel(alphabet, alphabet, std::move(m));
}

Channel add_symmetric_noise(const Channel& kappa, double eps) {
  return compose(symmetric_channel(kappa.output(), eps), kappa);
}

}  // namespace chanorder
