#include "chanorder/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chanorder {

namespace {

struct Row {
  std::size_t s, x1, x2;
  Rational mass;
};

// Masses are summed and range-checked exactly, then converted once.
JointDistribution joint_from_rows(std::size_t ns, const std::vector<Row>& rows) {
  const Alphabet s = Alphabet::range(ns), bits = Alphabet::range(2);
  std::vector<double> mass(ns * 4, 0.0);
  Rational total;
  for (const Row& r : rows) {
    total = total + r.mass;
    mass[(r.s * 2 + r.x1) * 2 + r.x2] = r.mass.to_double();
  }
  if (total != Rational(1)) throw ValidationError("scenario masses sum to " + total.to_string());
  return JointDistribution(s, bits, bits, std::move(mass));
}

// f(0) = f(1) = 0, f(2) = 1.
CoarseGraining and_coarse_graining() {
  return CoarseGraining(Alphabet::range(3), Alphabet::range(2), {0, 0, 1});
}

Matrix matrix_of(std::size_t rows, std::size_t cols, std::vector<double> entries) {
  Matrix m(rows, cols);
  std::copy(entries.begin(), entries.end(), m.data().begin());
  return m;
}

double indicator(bool b) { return b ? 1.0 : 0.0; }

double expected_utility(const ScenarioBundle& b, const std::string& channel) {
  return solve_decision(b.channel(channel), *b.prior, b.utility("u")).expected_utility;
}

double markov_defect(const ScenarioBundle& b) {
  return conditional_mutual_information(with_coarse_third(*b.joint, Output::x1, *b.coarse_graining));
}

double table_deviation(const Channel& computed, const Channel& printed) {
  return max_abs_difference(computed.matrix(), printed.matrix());
}

// Adds the channels X <- S (when every state occurs) and X <- f(S) (when
// every coarse symbol occurs).
void add_induced_channels(ScenarioBundle& b) {
  const JointDistribution& j = *b.joint;
  if (j.marginal_s().has_full_support()) {
    b.channels.emplace("x1_given_s", channel_from_joint(j, Output::x1));
    b.channels.emplace("x2_given_s", channel_from_joint(j, Output::x2));
  }
  const CoarseGraining& f = *b.coarse_graining;
  std::vector<double> pf(f.codomain().size(), 0.0);
  const ProbVector ps = j.marginal_s();
  for (std::size_t s = 0; s < ps.size(); ++s) pf[f(s)] += ps[s];
  if (std::all_of(pf.begin(), pf.end(), [](double v) { return v > 0.0; })) {
    b.channels.emplace("x1_given_fs", channel_from_joint(j, Output::x1, f));
    b.channels.emplace("x2_given_fs", channel_from_joint(j, Output::x2, f));
  }
}

void require_structure(const ScenarioBundle& b) {
  for (const ExpectedCheck& c : check_expected_values(b, kStructureTolerance)) {
    if (!c.pass) {
      throw ValidationError(b.name + ": structural check '" + c.quantity + "' gives " +
                            std::to_string(c.actual));
    }
  }
}

std::string trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return std::string(s);
}

// "(a,b)" -> {a, b}
std::pair<Rational, Rational> parse_pair(std::string_view args, std::string_view name) {
  if (args.size() < 2 || args.front() != '(' || args.back() != ')') {
    throw ValidationError("scenario '" + std::string(name) + "' needs parameters '(a,b)'");
  }
  args = args.substr(1, args.size() - 2);
  const auto comma = args.find(',');
  if (comma == std::string_view::npos) {
    throw ValidationError("scenario '" + std::string(name) + "' needs two parameters");
  }
  try {
    return {Rational::parse(args.substr(0, comma)), Rational::parse(args.substr(comma + 1))};
  } catch (const std::invalid_argument& e) {
    throw ValidationError("bad parameter in '" + std::string(name) + "': " + e.what());
  }
}

}  // namespace

const char* to_string(Provenance p) {
  return p == Provenance::published ? "published" : "derived";
}

const Channel& ScenarioBundle::channel(const std::string& key) const {
  auto it = channels.find(key);
  if (it == channels.end()) throw ValidationError(name + " has no channel '" + key + "'");
  return it->second;
}

const UtilityTable& ScenarioBundle::utility(const std::string& key) const {
  auto it = utilities.find(key);
  if (it == utilities.end()) throw ValidationError(name + " has no utility '" + key + "'");
  return it->second;
}

std::vector<ExpectedCheck> check_expected_values(const ScenarioBundle& bundle, double tolerance) {
  std::vector<ExpectedCheck> out;
  for (const ExpectedValue& ev : bundle.expected_values) {
    const double actual = ev.recompute(bundle);
    out.push_back({ev.quantity, ev.value, actual, ev.provenance,
                   std::abs(actual - ev.value) <= tolerance});
  }
  return out;
}

double output_dependence(const JointDistribution& j) {
  const std::size_t n1 = j.x1().size(), n2 = j.x2().size();
  std::vector<double> p(n1 * n2, 0.0), p1(n1, 0.0), p2(n2, 0.0);
  for (std::size_t s = 0; s < j.s().size(); ++s)
    for (std::size_t a = 0; a < n1; ++a)
      for (std::size_t b = 0; b < n2; ++b) {
        p[a * n2 + b] += j(s, a, b);
        p1[a] += j(s, a, b);
        p2[b] += j(s, a, b);
      }
  double info = 0.0;
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      const double v = p[a * n2 + b];
      if (v > 0.0) info += v * std::log2(v / (p1[a] * p2[b]));
    }
  return std::max(0.0, info);
}

double deviation_from_uniform_outputs(const JointDistribution& j) {
  const std::size_t n1 = j.x1().size(), n2 = j.x2().size();
  const double target = 1.0 / static_cast<double>(n1 * n2);
  double worst = 0.0;
  for (std::size_t a = 0; a < n1; ++a)
    for (std::size_t b = 0; b < n2; ++b) {
      double v = 0.0;
      for (std::size_t s = 0; s < j.s().size(); ++s) v += j(s, a, b);
      worst = std::max(worst, std::abs(v - target));
    }
  return worst;
}

double and_violation(const JointDistribution& j, const CoarseGraining& f) {
  if (j.x1().size() != 2 || j.x2().size() != 2 || f.codomain().size() != 2) {
    throw DimensionError("AND check needs binary outputs and a binary coarse-graining");
  }
  double bad = 0.0;
  for (std::size_t s = 0; s < j.s().size(); ++s)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        if (f(s) != (a & b)) bad += j(s, a, b);
  return bad;
}

double function_violation(const JointDistribution& j, Output which,
                          const std::vector<std::size_t>& g) {
  if (g.size() != j.s().size()) throw DimensionError("function table size differs from |S|");
  const Matrix p = j.pair_marginal(which);
  double bad = 0.0;
  for (std::size_t s = 0; s < p.rows(); ++s)
    for (std::size_t x = 0; x < p.cols(); ++x)
      if (x != g[s]) bad += p(s, x);
  return bad;
}

double coarse_pair_difference(const JointDistribution& j, const CoarseGraining& f) {
  if (j.x1().size() != j.x2().size()) return 1.0;
  const Matrix p1 = j.pair_marginal(Output::x1), p2 = j.pair_marginal(Output::x2);
  Matrix t1(f.codomain().size(), j.x1().size()), t2 = t1;
  for (std::size_t s = 0; s < p1.rows(); ++s)
    for (std::size_t x = 0; x < p1.cols(); ++x) {
      t1(f(s), x) += p1(s, x);
      t2(f(s), x) += p2(s, x);
    }
  return max_abs_difference(t1, t2);
}

Channel posterior_channel(const JointDistribution& j, Output which) {
  const Matrix p = j.pair_marginal(which);
  Matrix m(p.rows(), p.cols());
  for (std::size_t x = 0; x < p.cols(); ++x) {
    double px = 0.0;
    for (std::size_t s = 0; s < p.rows(); ++s) px += p(s, x);
    if (px <= 0.0) {
      throw UndefinedColumnError("P(S | X = " + j.output(which).label(x) + ") is undefined");
    }
    for (std::size_t s = 0; s < p.rows(); ++s) m(s, x) = p(s, x) / px;
  }
  return Channel(j.output(which), j.s(), std::move(m));
}

double conditional_entropy_at(const JointDistribution& j, Output which, std::size_t x) {
  return entropy(posterior_channel(j, which).matrix().column(x));
}

ScenarioBundle example_pregarbling() {
  ScenarioBundle b;
  b.name = "pregarbling";
  const Alphabet two = Alphabet::range(2);
  const Channel k1(two, two, matrix_of(2, 2, {0.9, 0.0, 0.1, 1.0}));
  const Channel swap(two, two, matrix_of(2, 2, {0.0, 1.0, 1.0, 0.0}));
  b.channels.emplace("kappa1", k1);
  b.channels.emplace("kappa2", Channel(two, two, matrix_of(2, 2, {0.0, 0.9, 1.0, 0.1})));
  b.channels.emplace("swap", swap);
  b.utilities.emplace("u", UtilityTable(two, two, matrix_of(2, 2, {2.0, 0.0, 0.0, 1.0})));
  b.prior = ProbVector::uniform(two);

  b.expected_values = {
      {"expected utility with kappa1", 1.4, Provenance::published,
       [](const ScenarioBundle& x) { return expected_utility(x, "kappa1"); }},
      {"expected utility with kappa2", 1.45, Provenance::published,
       [](const ScenarioBundle& x) { return expected_utility(x, "kappa2"); }},
      {"max |kappa2 - kappa1 . swap|", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return max_abs_difference(x.channel("kappa2").matrix(),
                                   compose(x.channel("kappa1"), x.channel("swap")).matrix());
       }},
      {"kappa1 is a garbling of kappa2 (1 = yes)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return indicator(test_garbling(x.channel("kappa1"), x.channel("kappa2")).has_value());
       }},
      {"kappa2 is a garbling of kappa1 (1 = yes)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return indicator(test_garbling(x.channel("kappa2"), x.channel("kappa1")).has_value());
       }},
  };
  return b;
}

ScenarioBundle example_and() {
  ScenarioBundle b;
  b.name = "and";
  const Rational q(1, 4), e(1, 8);
  b.joint = joint_from_rows(3, {{0, 0, 0, q}, {1, 0, 1, q}, {0, 1, 0, e}, {1, 1, 0, e},
                                {2, 1, 1, q}});
  b.coarse_graining = and_coarse_graining();
  b.prior = b.joint->marginal_s();
  add_induced_channels(b);
  const Alphabet s = Alphabet::range(3), two = Alphabet::range(2);
  b.utilities.emplace("u", UtilityTable(s, two, matrix_of(3, 2, {0, 0, 1, 0, 0, 1})));
  // The conditional tables as printed, columns indexed by the observation.
  b.channels.emplace("s_given_x1",
                     Channel(two, s, matrix_of(3, 2, {0.5, 0.25, 0.5, 0.25, 0.0, 0.5})));
  b.channels.emplace("s_given_x2",
                     Channel(two, s, matrix_of(3, 2, {0.75, 0.0, 0.25, 0.5, 0.0, 0.5})));

  b.expected_values = {
      {"expected utility with X1<-S", 0.5, Provenance::published,
       [](const ScenarioBundle& x) { return expected_utility(x, "x1_given_s"); }},
      {"expected utility with X2<-S", 0.375, Provenance::published,
       [](const ScenarioBundle& x) { return expected_utility(x, "x2_given_s"); }},
      {"max |P(x1,x2) - 1/4|", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return deviation_from_uniform_outputs(*x.joint); }},
      {"mass violating f(S) = AND(X1,X2)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return and_violation(*x.joint, *x.coarse_graining); }},
      {"I(S;X1|f(S))", 0.0, Provenance::published, markov_defect},
      {"max |(X1<-f(S)) - (X2<-f(S))|", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return max_abs_difference(x.channel("x1_given_fs").matrix(),
                                   x.channel("x2_given_fs").matrix());
       }},
      {"max |P(S|X1) - printed table|", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return table_deviation(posterior_channel(*x.joint, Output::x1), x.channel("s_given_x1"));
       }},
      {"max |P(S|X2) - printed table|", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return table_deviation(posterior_channel(*x.joint, Output::x2), x.channel("s_given_x2"));
       }},
      {"X1<-S is a garbling of X2<-S (1 = yes)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return indicator(
             test_garbling(x.channel("x1_given_s"), x.channel("x2_given_s")).has_value());
       }},
      {"H(S|X1=0)", 1.0, Provenance::published,
       [](const ScenarioBundle& x) { return conditional_entropy_at(*x.joint, Output::x1, 0); }},
      {"H(S|X1=1)", 1.5, Provenance::published,
       [](const ScenarioBundle& x) { return conditional_entropy_at(*x.joint, Output::x1, 1); }},
      {"H(S|X2=0)", 2.0 - 0.75 * std::log2(3.0), Provenance::derived,
       [](const ScenarioBundle& x) { return conditional_entropy_at(*x.joint, Output::x2, 0); }},
      {"H(S|X2=1)", 1.0, Provenance::published,
       [](const ScenarioBundle& x) { return conditional_entropy_at(*x.joint, Output::x2, 1); }},
  };
  return b;
}

ScenarioBundle example_and_deterministic() {
  ScenarioBundle b;
  b.name = "and-deterministic";
  const Rational sixth(1, 6), third(1, 3);
  b.joint = joint_from_rows(3, {{0, 0, 0, sixth}, {0, 1, 0, sixth}, {1, 0, 1, sixth},
                                {1, 1, 1, sixth}, {2, 1, 1, third}});
  b.coarse_graining = and_coarse_graining();
  b.prior = b.joint->marginal_s();
  add_induced_channels(b);
  const Alphabet s = Alphabet::range(3), two = Alphabet::range(2);
  b.utilities.emplace("u", UtilityTable(s, two, matrix_of(3, 2, {0, 0, 0, 1, 0, -1})));

  b.expected_values = {
      {"expected utility with X2<-S", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return expected_utility(x, "x2_given_s"); }},
      {"X2 rule is action 0 everywhere (1 = yes)", 1.0, Provenance::published,
       [](const ScenarioBundle& x) {
         const DecisionSolution d = solve_decision(x.channel("x2_given_s"), *x.prior, x.utility("u"));
         return indicator(std::all_of(d.rule.begin(), d.rule.end(),
                                      [](std::size_t a) { return a == 0; }));
       }},
      {"expected utility with X1<-S", 1.0 / 6.0, Provenance::derived,
       [](const ScenarioBundle& x) { return expected_utility(x, "x1_given_s"); }},
      {"mass violating X2 = g(S), g = (0,1,1)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return function_violation(*x.joint, Output::x2, {0, 1, 1}); }},
      {"I(S;X1|f(S))", 0.0, Provenance::published, markov_defect},
      {"max |(X1<-f(S)) - (X2<-f(S))|", 0.0, Provenance::published,
       [](const ScenarioBundle& x) {
         return max_abs_difference(x.channel("x1_given_fs").matrix(),
                                   x.channel("x2_given_fs").matrix());
       }},
  };
  return b;
}

ScenarioBundle family_and_grid(Rational a, Rational b) {
  if (a < Rational(-1, 8) || a > Rational(1, 8)) {
    throw DomainError("and-grid: a = " + a.to_string() + " outside [-1/8, 1/8]");
  }
  if (b < Rational(-1, 16) || b > Rational(1, 16)) {
    throw DomainError("and-grid: b = " + b.to_string() + " outside [-1/16, 1/16]");
  }
  const Rational e(1, 8), half(1, 2);
  const std::vector<std::pair<std::string, Rational>> named = {
      {"1/8 + 2b", e + Rational(2) * b},           {"1/8 - 2b", e - Rational(2) * b},
      {"1/8 + a", e + a},                          {"1/8 - a", e - a},
      {"1/8 + a/2 + b", e + half * a + b},         {"1/8 - a/2 - b", e - half * a - b},
  };
  std::string violated;
  for (const auto& [label, m] : named) {
    if (m < Rational(0)) violated += (violated.empty() ? "" : ", ") + label + " = " + m.to_string();
  }
  if (!violated.empty()) throw DomainError("and-grid: negative mass " + violated);

  ScenarioBundle out;
  out.name = "and-grid(" + a.to_string() + "," + b.to_string() + ")";
  out.joint = joint_from_rows(3, {{0, 0, 0, named[0].second}, {1, 0, 0, named[1].second},
                                  {0, 0, 1, named[2].second}, {1, 0, 1, named[3].second},
                                  {0, 1, 0, named[4].second}, {1, 1, 0, named[5].second},
                                  {2, 1, 1, Rational(1, 4)}});
  out.coarse_graining = and_coarse_graining();
  out.prior = out.joint->marginal_s();
  add_induced_channels(out);
  out.expected_values = {
      {"I(X1;X2)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return output_dependence(*x.joint); }},
      {"mass violating f(S) = AND(X1,X2)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return and_violation(*x.joint, *x.coarse_graining); }},
      {"I(S;X1|f(S))", 0.0, Provenance::published, markov_defect},
  };
  require_structure(out);
  return out;
}

ScenarioBundle family_and_deterministic(Rational a, Rational b) {
  if (a < Rational(0) || b < Rational(0)) {
    throw DomainError("and-det: parameters must be nonnegative (a = " + a.to_string() +
                      ", b = " + b.to_string() + ")");
  }
  const Rational sum = a + b;
  if (sum == Rational(0)) throw DomainError("and-det: a + b must be positive");
  if (sum > Rational(1)) {
    throw DomainError("and-det: negative mass 1 - a - b = " + (Rational(1) - sum).to_string());
  }
  const Rational ab = a * b / sum;

  ScenarioBundle out;
  out.name = "and-det(" + a.to_string() + "," + b.to_string() + ")";
  out.joint = joint_from_rows(3, {{0, 0, 0, a * a / sum}, {0, 1, 0, ab}, {1, 0, 1, ab},
                                  {1, 1, 1, b * b / sum}, {2, 1, 1, Rational(1) - sum}});
  out.coarse_graining = and_coarse_graining();
  out.prior = out.joint->marginal_s();
  add_induced_channels(out);
  out.expected_values = {
      {"mass violating X2 = g(S), g = (0,1,1)", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return function_violation(*x.joint, Output::x2, {0, 1, 1}); }},
      {"I(S;X1|f(S))", 0.0, Provenance::published, markov_defect},
      {"max |P(f(S),X1) - P(f(S),X2)|", 0.0, Provenance::published,
       [](const ScenarioBundle& x) { return coarse_pair_difference(*x.joint, *x.coarse_graining); }},
  };
  require_structure(out);
  return out;
}

ScenarioBundle scenario_by_name(std::string_view raw) {
  const std::string name = trim(raw);
  if (name == "pregarbling") return example_pregarbling();
  if (name == "and") return example_and();
  if (name == "and-deterministic") return example_and_deterministic();
  const auto paren = name.find('(');
  const std::string family = trim(std::string_view(name).substr(0, paren));
  if (paren != std::string::npos && (family == "and-grid" || family == "and-det")) {
    std::string args;
    for (char c : std::string_view(name).substr(paren)) {
      if (c != ' ') args += c;
    }
    const auto [a, b] = parse_pair(args, name);
    return family == "and-grid" ? family_and_grid(a, b) : family_and_deterministic(a, b);
  }
  throw ValidationError("unknown scenario '" + name +
                        "' (known: pregarbling, and, and-deterministic, and-grid(a,b), "
                        "and-det(a,b))");
}

std::vector<std::string> builtin_scenario_names() {
  return {"pregarbling", "and", "and-deterministic"};
}

}  // namespace chanorder
