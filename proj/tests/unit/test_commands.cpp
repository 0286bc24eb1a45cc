#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "chanorder/commands.hpp"
#include "chanorder/io.hpp"
#include "chanorder/scenarios.hpp"

using namespace chanorder;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("chanorder-commands-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ostringstream out, err;
    for (const char* name : {"pregarbling", "and"}) {
      ExampleArgs args{name, dir / name};
      cmd_example(args, out, err);
    }
  }
  ~Workspace() { fs::remove_all(dir); }
  fs::path operator()(const std::string& rel) const { return dir / rel; }
};

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("compare reports incomparability with both separating problems") {
  Workspace ws;
  std::ostringstream out, err;
  const int rc = cmd_compare({ws("pregarbling/channel-kappa1.txt"), ws("pregarbling/channel-kappa2.txt"), {}},
                             out, err);
  CHECK(rc == kExitIncomparable);
  CHECK(contains(out.str(), "relation: incomparable"));
  CHECK(contains(out.str(), "decision problem favoring first"));
  CHECK(contains(out.str(), "decision problem favoring second"));
}

TEST_CASE("compare of a file with itself is equivalent") {
  Workspace ws;
  std::ostringstream out, err;
  const auto k = ws("and/channel-x1_given_s.txt");
  CHECK(cmd_compare({k, k, ws("and/prior.txt")}, out, err) == kExitOk);
  CHECK(contains(out.str(), "relation: equivalent"));
}

TEST_CASE("malformed input gives a line-numbered error and exit 2") {
  Workspace ws;
  std::ofstream(ws("bad.txt")) << "channel 2 2\na b\nx y\n0.5 oops\n0.5 0.5\n";
  std::ostringstream out, err;
  CHECK(cmd_compare({ws("bad.txt"), ws("bad.txt"), {}}, out, err) == kExitInputError);
  CHECK(contains(err.str(), "bad.txt:4"));
}

TEST_CASE("decide prints the rule, utility and tie note") {
  Workspace ws;
  std::ostringstream out, err;
  CHECK(cmd_decide({ws("pregarbling/channel-kappa1.txt"), ws("pregarbling/prior.txt"),
                    ws("pregarbling/utility-u.txt")},
                   out, err) == kExitOk);
  CHECK(contains(out.str(), "0 -> 0\n"));
  CHECK(contains(out.str(), "1 -> 1\n"));
  CHECK(contains(out.str(), "expected utility: 1.4\n"));

  std::ostringstream out2;
  CHECK(cmd_decide({ws("and/channel-x2_given_s.txt"), ws("and/prior.txt"), ws("and/utility-u.txt")}, out2,
                   err) == kExitOk);
  CHECK(contains(out2.str(), "expected utility: 0.375\n"));
  CHECK(contains(out2.str(), "not unique"));
}

TEST_CASE("decide names a mismatched symbol") {
  Workspace ws;
  std::ofstream(ws("u.txt")) << "utility\ns a u\n0 0 1\n0 1 0\nq 0 0\nq 1 1\n";
  std::ostringstream out, err;
  CHECK(cmd_decide({ws("pregarbling/channel-kappa1.txt"), ws("pregarbling/prior.txt"), ws("u.txt")}, out,
                   err) == kExitInputError);
  CHECK(contains(err.str(), "'q'"));
}

TEST_CASE("ui on a file and on a scenario") {
  Workspace ws;
  std::ostringstream out, err;
  UiArgs args;
  args.joint = ws("and/joint.txt");
  args.direction = "x1";
  CHECK(cmd_ui(args, out, err) == kExitOk);
  CHECK(contains(out.str(), "UI(S;X1\\X2): 0.197340"));
  CHECK_FALSE(contains(out.str(), "X2\\X1"));

  UiArgs s;
  s.scenario = "and-grid(1/32,1/64)";
  std::ostringstream out2;
  CHECK(cmd_ui(s, out2, err) == kExitOk);
  CHECK(contains(out2.str(), "0.000000"));

  UiArgs slow;
  slow.scenario = "and";
  slow.tolerance = 1e-300;
  slow.max_iterations = 2;
  std::ostringstream out3;
  CHECK(cmd_ui(slow, out3, err) == kExitNotConverged);
  CHECK(contains(out3.str(), "NOT converged"));
}

TEST_CASE("heatmap grid and CSV layout") {
  const auto grid = compute_heatmap("and-grid", 5, kDefaultUITolerance, 2);
  CHECK(grid.a_values.front() == Rational(-1, 8));
  CHECK(grid.b_values.back() == Rational(1, 16));
  std::size_t present = 0;
  for (const auto& c : grid.cells) present += c.has_value();
  CHECK(present == 25);

  std::ostringstream csv;
  write_heatmap_csv(csv, grid);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "a,b,ui_x1_minus_x2,ui_x2_minus_x1,gap_x1,gap_x2,converged_x1,converged_x2");
  CHECK(first.rfind("-0.125,-0.0625,", 0) == 0);

  const auto det = compute_heatmap("and-det", 5, kDefaultUITolerance, 1);
  for (std::size_t ia = 0; ia < 5; ++ia) {
    for (std::size_t ib = 0; ib < 5; ++ib) {
      const Rational s = det.a_values[ia] + det.b_values[ib];
      CHECK(det.at(ia, ib).has_value() == (s <= Rational(1) && s > Rational(0)));
    }
  }
  CHECK_THROWS(compute_heatmap("nope", 5));
  CHECK_THROWS(compute_heatmap("and-grid", 1));
}

TEST_CASE("heatmap output is independent of the thread count") {
  std::ostringstream one, four;
  write_heatmap_csv(one, compute_heatmap("and-det", 4, kDefaultUITolerance, 1));
  write_heatmap_csv(four, compute_heatmap("and-det", 4, kDefaultUITolerance, 4));
  CHECK(one.str() == four.str());
}

TEST_CASE("heatmap to an unwritable path is an input error") {
  HeatmapArgs args;
  args.family = "and-det";
  args.resolution = 2;
  args.out = "/nonexistent/dir/grid.csv";
  std::ostringstream out, err;
  CHECK(cmd_heatmap(args, out, err) == kExitInputError);
}

TEST_CASE("example command passes and lists names for unknown ones") {
  std::ostringstream out, err;
  CHECK(cmd_example({"and-deterministic", {}}, out, err) == kExitOk);
  CHECK_FALSE(contains(out.str(), "FAIL"));
  std::ostringstream out2, err2;
  CHECK(cmd_example({"nope", {}}, out2, err2) == kExitInputError);
  CHECK(contains(err2.str(), "pregarbling"));
}

TEST_CASE("capacity and more-capable reports") {
  Workspace ws;
  std::ofstream(ws("bsc.txt")) << "channel 2 2\n0 1\n0 1\n0.9 0.1\n0.1 0.9\n";
  std::ostringstream out, err;
  CHECK(cmd_capacity({ws("bsc.txt")}, out, err) == kExitOk);
  CHECK(contains(out.str(), "capacity: 0.531004406"));

  std::ostringstream a, b;
  MoreCapableArgs args{ws("pregarbling/channel-kappa1.txt"), ws("pregarbling/channel-kappa1.txt"), 10, 20, 3};
  CHECK(cmd_more_capable(args, a, err) == kExitOk);
  CHECK(contains(a.str(), "unrefuted"));
  CHECK(contains(a.str(), "priors tested: 31"));
  cmd_more_capable(args, b, err);
  CHECK(a.str() == b.str());
}
