// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "../support/random_objects.hpp"
#include "chanorder/blackwell.hpp"
#include "chanorder/capability.hpp"
#include "chanorder/commands.hpp"
#include "chanorder/io.hpp"
#include "chanorder/scenarios.hpp"
#include "chanorder/ui.hpp"

using namespace chanorder;
using chanorder::testing::RandomObjects;

namespace {

constexpr double kExactTolerance = 1e-12;
constexpr double kInformationTolerance = 1e-9;
constexpr double kSeparationMinimum = 1e-9;
constexpr double kUIZero = 1e-6;
constexpr double kUIPositive = 1e-4;
constexpr double kOracleAbsolute = 1e-3;
constexpr double kGapAtConvergence = 1e-7;
constexpr double kDiagonalZero = 1e-5;
constexpr double kCapacityTolerance = 1e-6;
constexpr double kCapacityMonotonicity = 2e-6;
constexpr std::size_t kOracleDensity = 200;
constexpr std::size_t kGridResolution = 17;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double utility_with(const ScenarioBundle& b, const std::string& channel) {
  return solve_decision(b.channel(channel), *b.prior, b.utility("u")).expected_utility;
}

double optimal(const Channel& k, const ProbVector& prior, const UtilityTable& u) {
  return solve_decision(k, prior, u).expected_utility;
}

Outcome pregarbling_example() {
  Outcome o;
  const auto b = example_pregarbling();
  const double u1 = utility_with(b, "kappa1"), u2 = utility_with(b, "kappa2");
  o.require(std::abs(u1 - 1.4) <= kExactTolerance, "kappa1 utility " + num(u1));
  o.require(std::abs(u2 - 1.45) <= kExactTolerance, "kappa2 utility " + num(u2));
  o.require(!test_garbling(b.channel("kappa1"), b.channel("kappa2")), "kappa1 is a garbling of kappa2");
  o.require(!test_garbling(b.channel("kappa2"), b.channel("kappa1")), "kappa2 is a garbling of kappa1");
  return o;
}

Outcome and_example() {
  Outcome o;
  const auto b = example_and();
  const double u1 = utility_with(b, "x1_given_s"), u2 = utility_with(b, "x2_given_s");
  o.require(std::abs(u1 - 0.5) <= kExactTolerance, "X1 utility " + num(u1));
  o.require(std::abs(u2 - 0.375) <= kExactTolerance, "X2 utility " + num(u2));
  o.require(b.channel("x1_given_fs").matrix() == b.channel("x2_given_fs").matrix(),
            "X1<-f(S) and X2<-f(S) differ");
  const double cmi = conditional_mutual_information(with_coarse_third(*b.joint, Output::x1, *b.coarse_graining));
  o.require(cmi <= kExactTolerance, "I(S;X1|f(S)) = " + num(cmi));
  o.require(!test_garbling(b.channel("x1_given_s"), b.channel("x2_given_s")),
            "X1<-S is a garbling of X2<-S");
  return o;
}

Outcome separating_problems() {
  Outcome o;
  auto check_pair = [&](const std::string& name, const Channel& k1, const Channel& k2, const ProbVector& prior) {
    const auto v = compare(k1, k2, prior);
    o.require(v.relation == Relation::incomparable, name + " not incomparable");
    if (v.favoring_first) {
      const auto& p = v.favoring_first->problem;
      const double gap = optimal(k1, p.prior, p.utility) - optimal(k2, p.prior, p.utility);
      o.require(gap > kSeparationMinimum, name + " first-favoring gap " + num(gap));
    }
    if (v.favoring_second) {
      const auto& p = v.favoring_second->problem;
      const double gap = optimal(k2, p.prior, p.utility) - optimal(k1, p.prior, p.utility);
      o.require(gap > kSeparationMinimum, name + " second-favoring gap " + num(gap));
    }
    o.require(v.favoring_first && v.favoring_second, name + " missing a separating problem");
  };
  const auto p = example_pregarbling();
  check_pair("pregarbling", p.channel("kappa1"), p.channel("kappa2"), *p.prior);
  const auto a = example_and();
  check_pair("and", a.channel("x1_given_s"), a.channel("x2_given_s"), *a.prior);
  const double table_gap = utility_with(a, "x1_given_s") - utility_with(a, "x2_given_s");
  o.require(std::abs(table_gap - 0.125) <= kExactTolerance, "printed utility gap " + num(table_gap));
  return o;
}

Outcome markov_identity() {
  Outcome o;
  auto check = [&](const JointDistribution& j, const CoarseGraining& f, const std::string& name) {
    for (Output w : {Output::x1, Output::x2}) {
      const auto lhs = compose(channel_from_joint(j, w), coarse_graining_pregarbler(j, f));
      const double d = max_abs_difference(lhs.matrix(), markov_approximation(j, w, f).matrix());
      o.require(d <= kExactTolerance, name + " differs by " + num(d));
    }
  };
  for (const auto& b : {example_and(), example_and_deterministic()}) check(*b.joint, *b.coarse_graining, b.name);
  RandomObjects rng(401);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ns = 3 + rng.below(3);
    const auto j = rng.joint(ns, 2 + rng.below(2), 2 + rng.below(2));
    check(j, rng.coarse_graining(ns, 2 + rng.below(ns - 2)), "random instance " + std::to_string(trial));
  }
  return o;
}

Outcome less_capable_chain() {
  Outcome o;
  std::uint64_t seed = 501;
  for (const auto& b : {example_and(), example_and_deterministic()}) {
    for (Output w : {Output::x1, Output::x2}) {
      const auto r = verify_less_capable_lemma(*b.joint, w, *b.coarse_graining, 1000, seed++);
      o.require(r.trials == 1000 && r.max_violation <= kInformationTolerance,
                b.name + " violation " + num(r.max_violation));
    }
  }
  return o;
}

Outcome garbling_never_helps() {
  Outcome o;
  RandomObjects rng(601);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t ns = 2 + rng.below(3), nx = 2 + rng.below(3), ny = 2 + rng.below(3);
    const auto k2 = rng.channel(ns, nx);
    const auto k1 = compose(rng.channel(nx, ny), k2);
    const auto prior = rng.prior(ns);
    const auto u = rng.utility(ns, 2 + rng.below(3));
    const double d = optimal(k2, prior, u) - optimal(k1, prior, u);
    o.require(d >= -kInformationTolerance, "tuple " + std::to_string(trial) + " loses " + num(-d));
  }
  return o;
}

Outcome ui_blackwell_equivalence() {
  Outcome o;
  int checked = 0, disagreements = 0;
  auto check = [&](const JointDistribution& j, const std::string& name) {
    for (Direction d : {Direction::x1_minus_x2, Direction::x2_minus_x1}) {
      const auto r = ui_blackwell_equivalence_check(j, d, kUIZero);
      ++checked;
      disagreements += !r.agree;
      o.require(r.agree, name + " " + to_string(d) + ": UI " + num(r.ui.value) + ", witness " +
                             (r.witness ? "yes" : "no"));
    }
  };
  check(*example_and().joint, "and");
  check(*example_and_deterministic().joint, "and-deterministic");

  RandomObjects rng(701);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ns = 2 + rng.below(2), n1 = 2 + rng.below(2), n2 = 2 + rng.below(2);
    if (trial % 2 == 0) {
      check(rng.joint(ns, n1, n2, trial % 4 == 0 ? 0.25 : 0.0), "random joint " + std::to_string(trial));
    } else {
      // X2 a garbling of X1, so UI(S;X2\X1) vanishes
      const auto k1 = rng.channel(ns, n1);
      const auto k2 = compose(rng.channel(n1, n2), k1);
      check(joint_from_channels(rng.prior(ns), k1, k2), "ordered joint " + std::to_string(trial));
    }
  }
  const double ui = unique_information(*example_and().joint, Direction::x1_minus_x2).value;
  o.require(ui > kUIPositive, "and UI(S;X1\\X2) = " + num(ui));
  if (disagreements) {
    o.detail += " (" + std::to_string(disagreements) + " of " + std::to_string(checked) + " checks disagree)";
  }
  return o;
}

Outcome solver_vs_oracle() {
  Outcome o;
  RandomObjects rng(801);
  for (int trial = 0; trial < 50; ++trial) {
    const auto j = rng.joint(2, 2, 2);
    for (Direction d : {Direction::x1_minus_x2, Direction::x2_minus_x1}) {
      const auto r = unique_information(j, d);
      const double oracle = unique_information_oracle(j, d, kOracleDensity);
      const std::string tag = "joint " + std::to_string(trial) + " " + to_string(d);
      o.require(r.converged, tag + " did not converge");
      o.require(r.duality_gap <= kGapAtConvergence, tag + " gap " + num(r.duality_gap));
      o.require(std::abs(r.value - oracle) <= std::max(kOracleAbsolute, 2 * r.duality_gap),
                tag + ": solver " + num(r.value) + ", oracle " + num(oracle));
    }
  }
  return o;
}

Outcome and_grid_family() {
  Outcome o;
  for (int k = 0; k <= 8; ++k) {
    const Rational a = Rational(-1, 8) + Rational(k, 32);
    const auto j = *family_and_grid(a, a / Rational(2)).joint;
    for (Direction d : {Direction::x1_minus_x2, Direction::x2_minus_x1}) {
      const double ui = unique_information(j, d).value;
      o.require(ui <= kDiagonalZero, "diagonal a = " + a.to_string() + ": UI " + num(ui));
    }
  }

  const auto grid = compute_heatmap("and-grid", kGridResolution, kDefaultUITolerance);
  const std::size_t last = kGridResolution - 1;
  const auto& upper_left = grid.at(0, last);  // (-1/8, 1/16)
  const auto& lower_right = grid.at(last, 0);  // (1/8, -1/16)
  if (!upper_left || !lower_right) {
    o.require(false, "corner cell missing");
    return o;
  }
  const auto base = *example_and().joint;
  const double slack = 2 * kDefaultUITolerance;
  for (Direction d : {Direction::x1_minus_x2, Direction::x2_minus_x1}) {
    auto value = [d](const HeatmapCell& c) {
      return d == Direction::x1_minus_x2 ? c.x1_minus_x2.value : c.x2_minus_x1.value;
    };
    double best = 0.0;
    for (const auto& c : grid.cells) {
      if (c) best = std::max(best, value(*c));
    }
    const double example = unique_information(base, d).value;
    for (const auto* corner : {&*upper_left, &*lower_right}) {
      const std::string at = std::string(to_string(d)) + " corner (" + corner->a.to_string() + "," +
                             corner->b.to_string() + ")";
      o.require(value(*corner) >= best - slack, at + " " + num(value(*corner)) + " below max " + num(best));
      o.require(std::abs(value(*corner) - example) <= slack,
                at + " " + num(value(*corner)) + " vs example " + num(example));
    }
  }
  return o;
}

Outcome capacity_checks() {
  Outcome o;
  const double h = -0.1 * std::log2(0.1) - 0.9 * std::log2(0.9);
  const double bsc = capacity(symmetric_channel(Alphabet::range(2), 0.1)).capacity;
  o.require(std::abs(bsc - (1 - h)) <= kCapacityTolerance, "BSC(0.1) " + num(bsc));
  const double id = capacity(Channel::identity(Alphabet::range(3))).capacity;
  o.require(std::abs(id - std::log2(3.0)) <= kCapacityTolerance, "identity " + num(id));
  RandomObjects rng(1001);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t ns = 2 + rng.below(3), nx = 2 + rng.below(3);
    const auto k = rng.channel(ns, nx);
    const auto g = compose(rng.channel(nx, 2 + rng.below(3)), k);
    const double ck = capacity(k).capacity, cg = capacity(g).capacity;
    o.require(cg <= ck + kCapacityMonotonicity, "garbling " + std::to_string(trial) + ": " + num(cg) +
                                                     " > " + num(ck));
  }
  return o;
}

template <class T, class Parse>
bool round_trips(const T& value, Parse parse) {
  const std::string text = to_text(value);
  std::istringstream in(text);
  return to_text(parse(in, "<round-trip>")) == text;
}

Outcome file_formats() {
  Outcome o;
  std::vector<ScenarioBundle> bundles;
  for (const auto& name : builtin_scenario_names()) bundles.push_back(scenario_by_name(name));
  bundles.push_back(family_and_grid(Rational(1, 32), Rational(1, 64)));
  bundles.push_back(family_and_deterministic(Rational(1, 4), Rational(1, 2)));
  for (const auto& b : bundles) {
    if (b.joint) o.require(round_trips(*b.joint, parse_joint), b.name + " joint");
    if (b.prior) o.require(round_trips(*b.prior, parse_prior), b.name + " prior");
    for (const auto& [key, c] : b.channels) o.require(round_trips(c, parse_channel), b.name + " channel " + key);
    for (const auto& [key, u] : b.utilities) o.require(round_trips(u, parse_utility), b.name + " utility " + key);
  }
  for (const auto& name : builtin_scenario_names()) {
    std::ostringstream out, err;
    const int rc = cmd_example({name, {}}, out, err);
    o.require(rc == kExitOk && out.str().find("FAIL") == std::string::npos, "example " + name + " failed");
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"pre-garbling example: utilities 1.4 / 1.45, no garbling either way", pregarbling_example},
      {"AND example: utilities 1/2 / 3/8, identical coarse channels, Markov chain, no garbling", and_example},
      {"separating decision problems verify with a strict gap", separating_problems},
      {"Markov approximation equals pre-garbling by the coarse-graining", markov_identity},
      {"coarse-graining information chain under 1000 random priors", less_capable_chain},
      {"garbling never increases optimal expected utility", garbling_never_helps},
      {"vanishing UI coincides with garbling-witness existence", ui_blackwell_equivalence},
      {"UI solver matches the brute-force oracle on 2x2x2 joints", solver_vs_oracle},
      {"and-grid family: zero diagonal, maximal corners equal to the AND example", and_grid_family},
      {"capacity closed forms and monotonicity under garbling", capacity_checks},
      {"file-format round trip and example re-derivation", file_formats},
  };

  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  criterion %2d: %s (%.2fs)%s%s\n", o.pass ? "PASS" : "FAIL", index, c.title, seconds,
                o.pass ? "" : " -- ", o.detail.c_str());
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
