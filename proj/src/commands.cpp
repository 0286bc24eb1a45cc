#include "chanorder/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

#include "chanorder/blackwell.hpp"
#include "chanorder/capability.hpp"
#include "chanorder/io.hpp"
#include "chanorder/scenarios.hpp"

namespace chanorder {

namespace {

std::string format_fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string format_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string join_labels(const Alphabet& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? " " : "") + a.label(i);
  return s;
}

// Positions of `target`'s labels inside `source`; the two alphabets must
// hold the same labels, possibly in another order.
std::vector<std::size_t> label_map(const Alphabet& source, const Alphabet& target,
                                   const std::string& what) {
  for (const auto& l : source.labels()) {
    if (!target.find(l)) throw ValidationError(what + ": unexpected symbol '" + l + "'");
  }
  std::vector<std::size_t> pos;
  for (const auto& l : target.labels()) {
    auto i = source.find(l);
    if (!i) throw ValidationError(what + ": missing symbol '" + l + "'");
    pos.push_back(*i);
  }
  return pos;
}

ProbVector align_prior(const ProbVector& p, const Alphabet& inputs) {
  const auto pos = label_map(p.alphabet(), inputs, "prior vs channel input");
  std::vector<double> m;
  for (std::size_t i : pos) m.push_back(p[i]);
  return ProbVector(inputs, std::move(m));
}

Channel align_input(const Channel& c, const Alphabet& inputs) {
  const auto pos = label_map(c.input(), inputs, "channel inputs");
  Matrix m(c.output().size(), inputs.size());
  for (std::size_t x = 0; x < m.rows(); ++x)
    for (std::size_t s = 0; s < m.cols(); ++s) m(x, s) = c(x, pos[s]);
  return Channel(inputs, c.output(), std::move(m));
}

UtilityTable align_states(const UtilityTable& u, const Alphabet& states) {
  const auto pos = label_map(u.states(), states, "utility states vs channel input");
  Matrix m(states.size(), u.actions().size());
  for (std::size_t s = 0; s < m.rows(); ++s)
    for (std::size_t a = 0; a < m.cols(); ++a) m(s, a) = u(pos[s], a);
  return UtilityTable(states, u.actions(), std::move(m));
}

void print_separation(std::ostream& out, const char* title, const SeparatingProblem& sp) {
  out << title << '\n';
  write_prior(out, sp.problem.prior);
  write_utility(out, sp.problem.utility);
  out << "expected utility: winner " << format_value(sp.better_utility) << ", other "
      << format_value(sp.worse_utility) << ", gap " << format_value(sp.gap()) << '\n';
}

template <class F>
int guarded(std::ostream& err, F body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

void print_ui(std::ostream& out, const char* label, const UIResult& r) {
  out << label << ": " << format_fixed(r.value, 9) << " bits (gap " << format_short(r.duality_gap)
      << ", " << r.iterations << " iterations, " << (r.converged ? "converged" : "NOT converged")
      << ")\n";
}

std::vector<Rational> axis(Rational lo, Rational hi, std::size_t n) {
  std::vector<Rational> v;
  const Rational step = (hi - lo) / Rational(static_cast<std::int64_t>(n - 1));
  for (std::size_t i = 0; i < n; ++i) v.push_back(lo + step * Rational(static_cast<std::int64_t>(i)));
  return v;
}

}  // namespace

std::string format_value(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Channel k1 = read_channel_file(args.first);
    const Channel k2 = align_input(read_channel_file(args.second), k1.input());
    const ProbVector prior = args.prior ? align_prior(read_prior_file(*args.prior), k1.input())
                                        : ProbVector::uniform(k1.input());
    const GarblingVerdict v = compare(k1, k2, prior);

    out << "relation: " << to_string(v.relation) << '\n';
    out << "first is a garbling of second: " << (v.witness_forward ? "yes" : "no") << '\n';
    if (v.witness_forward) write_channel(out, *v.witness_forward);
    out << "second is a garbling of first: " << (v.witness_backward ? "yes" : "no") << '\n';
    if (v.witness_backward) write_channel(out, *v.witness_backward);
    if (v.favoring_first) print_separation(out, "decision problem favoring first:", *v.favoring_first);
    if (v.favoring_second) {
      print_separation(out, "decision problem favoring second:", *v.favoring_second);
    }
    return v.relation == Relation::incomparable ? kExitIncomparable : kExitOk;
  });
}

int cmd_decide(const DecideArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Channel k = read_channel_file(args.channel);
    const ProbVector prior = align_prior(read_prior_file(args.prior), k.input());
    const UtilityTable u = align_states(read_utility_file(args.utility), k.input());
    const DecisionSolution d = solve_decision(k, prior, u);

    out << "rule:\n";
    for (std::size_t x = 0; x < d.rule.size(); ++x) {
      out << "  " << k.output().label(x) << " -> " << u.actions().label(d.rule[x]);
      if (!d.reachable[x]) {
        out << " (unreachable)";
      } else if (d.tie[x]) {
        out << " (tie)";
      }
      out << '\n';
    }
    out << "expected utility: " << format_value(d.expected_utility) << '\n';
    for (std::size_t x = 0; x < d.rule.size(); ++x) {
      if (d.reachable[x] && d.tie[x]) {
        out << "note: the optimal action at observation " << k.output().label(x)
            << " is not unique\n";
      }
    }
    return kExitOk;
  });
}

int cmd_ui(const UiArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.joint.has_value() == args.scenario.has_value()) {
      throw ValidationError("give exactly one of a joint file or --scenario");
    }
    if (args.direction != "both" && args.direction != "x1" && args.direction != "x2") {
      throw ValidationError("--direction must be both, x1 or x2");
    }
    std::optional<JointDistribution> j;
    if (args.joint) {
      j = read_joint_file(*args.joint);
    } else {
      ScenarioBundle b = scenario_by_name(*args.scenario);
      if (!b.joint) throw ValidationError("scenario '" + b.name + "' has no joint distribution");
      j = *b.joint;
    }
    bool converged = true;
    if (args.direction != "x2") {
      const UIResult r = unique_information(*j, Direction::x1_minus_x2, args.tolerance,
                                            args.max_iterations);
      print_ui(out, "UI(S;X1\\X2)", r);
      converged = converged && r.converged;
    }
    if (args.direction != "x1") {
      const UIResult r = unique_information(*j, Direction::x2_minus_x1, args.tolerance,
                                            args.max_iterations);
      print_ui(out, "UI(S;X2\\X1)", r);
      converged = converged && r.converged;
    }
    return converged ? kExitOk : kExitNotConverged;
  });
}

HeatmapGrid compute_heatmap(const std::string& family, std::size_t resolution, double tolerance,
                            unsigned threads) {
  if (resolution < 2) throw ValidationError("heatmap resolution must be at least 2");
  HeatmapGrid grid;
  grid.family = family;
  ScenarioBundle (*make)(Rational, Rational) = nullptr;
  if (family == "and-grid") {
    grid.a_values = axis(Rational(-1, 8), Rational(1, 8), resolution);
    grid.b_values = axis(Rational(-1, 16), Rational(1, 16), resolution);
    make = family_and_grid;
  } else if (family == "and-det") {
    grid.a_values = axis(Rational(0), Rational(1), resolution);
    grid.b_values = grid.a_values;
    make = family_and_deterministic;
  } else {
    throw ValidationError("unknown family '" + family + "' (expected and-grid or and-det)");
  }

  const std::size_t n = grid.a_values.size() * grid.b_values.size();
  grid.cells.resize(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const Rational a = grid.a_values[i / grid.b_values.size()];
      const Rational b = grid.b_values[i % grid.b_values.size()];
      std::optional<ScenarioBundle> bundle;
      try {
        bundle = make(a, b);
      } catch (const DomainError&) {
        continue;  // outside the family: left absent
      }
      grid.cells[i] = HeatmapCell{a, b, unique_information(*bundle->joint, Direction::x1_minus_x2, tolerance),
                                  unique_information(*bundle->joint, Direction::x2_minus_x1, tolerance)};
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return grid;
}

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& grid) {
  out << "a,b,ui_x1_minus_x2,ui_x2_minus_x1,gap_x1,gap_x2,converged_x1,converged_x2\n";
  for (const auto& cell : grid.cells) {
    if (!cell) continue;
    out << format_number(cell->a.to_double()) << ',' << format_number(cell->b.to_double()) << ','
        << format_number(cell->x1_minus_x2.value) << ',' << format_number(cell->x2_minus_x1.value)
        << ',' << format_number(cell->x1_minus_x2.duality_gap) << ','
        << format_number(cell->x2_minus_x1.duality_gap) << ','
        << (cell->x1_minus_x2.converged ? 1 : 0) << ',' << (cell->x2_minus_x1.converged ? 1 : 0)
        << '\n';
  }
}

int cmd_heatmap(const HeatmapArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const HeatmapGrid grid = compute_heatmap(args.family, args.resolution, args.tolerance, args.threads);
    std::ostringstream csv;
    write_heatmap_csv(csv, grid);
    write_text_file(args.out, csv.str());
    std::size_t rows = 0, unconverged = 0;
    for (const auto& c : grid.cells) {
      if (!c) continue;
      ++rows;
      unconverged += !c->x1_minus_x2.converged + !c->x2_minus_x1.converged;
    }
    out << "wrote " << rows << " rows to " << args.out.string() << '\n';
    if (unconverged) {
      out << unconverged << " cell directions did not converge\n";
      return kExitNotConverged;
    }
    return kExitOk;
  });
}

int cmd_example(const ExampleArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioBundle b = scenario_by_name(args.name);
    out << "scenario " << b.name << "\n\n";
    if (b.joint) {
      out << "# joint\n";
      write_joint(out, *b.joint);
      out << '\n';
    }
    if (b.coarse_graining) {
      out << "# coarse-graining f\n";
      for (std::size_t s = 0; s < b.coarse_graining->domain().size(); ++s) {
        out << "f(" << b.coarse_graining->domain().label(s)
            << ") = " << b.coarse_graining->codomain().label((*b.coarse_graining)(s)) << '\n';
      }
      out << '\n';
    }
    if (b.prior) {
      out << "# prior\n";
      write_prior(out, *b.prior);
      out << '\n';
    }
    for (const auto& [key, c] : b.channels) {
      out << "# channel " << key << '\n';
      write_channel(out, c);
      out << '\n';
    }
    for (const auto& [key, u] : b.utilities) {
      out << "# utility " << key << '\n';
      write_utility(out, u);
      out << '\n';
    }

    bool all = true;
    for (const ExpectedCheck& c : check_expected_values(b)) {
      all = all && c.pass;
      out << (c.pass ? "PASS" : "FAIL") << "  [" << to_string(c.provenance) << "] " << c.quantity
          << ": expected " << format_value(c.expected) << ", got " << format_value(c.actual)
          << '\n';
    }

    if (args.out_dir) {
      std::filesystem::create_directories(*args.out_dir);
      const auto& dir = *args.out_dir;
      if (b.joint) write_text_file(dir / "joint.txt", to_text(*b.joint));
      if (b.prior) write_text_file(dir / "prior.txt", to_text(*b.prior));
      for (const auto& [key, c] : b.channels) write_text_file(dir / ("channel-" + key + ".txt"), to_text(c));
      for (const auto& [key, u] : b.utilities) write_text_file(dir / ("utility-" + key + ".txt"), to_text(u));
      out << "files written to " << dir.string() << '\n';
    }
    return all ? kExitOk : kExitCheckFailed;
  });
}

int cmd_capacity(const CapacityArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Channel k = read_channel_file(args.channel);
    const CapacityResult c = capacity(k, args.tolerance);
    out << "capacity: " << format_value(c.capacity) << " +/- " << format_short(c.gap_bound)
        << " bits\n";
    out << "optimal prior: " << join_labels(c.optimal_prior.alphabet()) << '\n';
    for (std::size_t i = 0; i < c.optimal_prior.size(); ++i) {
      out << (i ? " " : "") << format_value(c.optimal_prior[i]);
    }
    out << "\niterations: " << c.iterations << '\n';
    return kExitOk;
  });
}

int cmd_more_capable(const MoreCapableArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Channel k1 = read_channel_file(args.first);
    const Channel k2 = align_input(read_channel_file(args.second), k1.input());
    const CapabilityVerdict v = more_capable_refute(k1, k2, args.grid, args.samples, args.seed);
    if (v.status == CapabilityStatus::refuted) {
      out << "refuted: second is not more capable than first\n";
      out << "counterexample prior: " << join_labels(v.counterexample->alphabet()) << '\n';
      for (std::size_t i = 0; i < v.counterexample->size(); ++i) {
        out << (i ? " " : "") << format_value((*v.counterexample)[i]);
      }
      out << "\nI(S;first) = " << format_value(v.info_first) << " bits, I(S;second) = "
          << format_value(v.info_second) << " bits\n";
    } else {
      out << "unrefuted: no tested prior gives the first channel more information\n";
    }
    out << "priors tested: " << v.priors_tested << '\n';
    return kExitOk;
  });
}

}  // namespace chanorder
