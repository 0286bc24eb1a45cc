#include <doctest.h>

#include <sstream>

#include "../support/random_objects.hpp"
#include "chanorder/io.hpp"
#include "chanorder/scenarios.hpp"

using namespace chanorder;

namespace {

template <class T, class Parse>
void check_round_trip(const T& value, Parse parse) {
  const std::string text = to_text(value);
  std::istringstream in(text);
  const T back = parse(in, "<test>");
  CHECK(back == value);
  CHECK(to_text(back) == text);
}

std::size_t error_line(const std::string& text, JointDistribution (*)(std::istream&, std::string_view)) {
  std::istringstream in(text);
  try {
    parse_joint(in, "<test>");
  } catch (const ParseError& e) {
    return e.line();
  }
  return 9999;
}

}  // namespace

TEST_CASE("shortest round-trip numbers") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3) == "0.3333333333333333");
  CHECK(format_number(1e-20) == "1e-20");
}

TEST_CASE("channel file format") {
  std::istringstream in(
      "# a comment\n"
      "channel 2 3\n"
      "\n"
      "s0 s1\n"
      "a b c\n"
      "0.5 0\n"
      "# another comment\n"
      "0.25   1\n"
      "0.25 0\n");
  const Channel c = parse_channel(in);
  CHECK(c.input().label(1) == "s1");
  CHECK(c.output().label(2) == "c");
  CHECK(c(1, 1) == 1.0);
  CHECK(to_text(c) == "channel 2 3\ns0 s1\na b c\n0.5 0\n0.25 1\n0.25 0\n");
}

TEST_CASE("random objects round-trip bit-identically") {
  testing::RandomObjects rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    check_round_trip(rng.channel(3, 4), parse_channel);
    check_round_trip(rng.prior(5), parse_prior);
    check_round_trip(rng.joint(3, 2, 2, 0.3), parse_joint);
    check_round_trip(rng.utility(3, 2), parse_utility);
  }
}

TEST_CASE("scenario tables round-trip bit-identically") {
  for (const auto& name : builtin_scenario_names()) {
    const auto b = scenario_by_name(name);
    if (b.joint) check_round_trip(*b.joint, parse_joint);
    if (b.prior) check_round_trip(*b.prior, parse_prior);
    for (const auto& [key, c] : b.channels) check_round_trip(c, parse_channel);
    for (const auto& [key, u] : b.utilities) check_round_trip(u, parse_utility);
  }
}

TEST_CASE("joint with zero-mass symbols keeps its alphabets") {
  std::vector<double> m(2 * 3 * 2, 0.0);
  m[0] = 0.5;
  m[(1 * 3 + 1) * 2 + 1] = 0.5;
  const JointDistribution j(Alphabet::range(2), Alphabet::range(3), Alphabet::range(2), m);
  const std::string text = to_text(j);
  CHECK(text.find("labels x1 0 1 2") != std::string::npos);
  check_round_trip(j, parse_joint);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("joint\ns x1 x2 p\n0 0 0 0.5\n0 0 1 zero\n", parse_joint) == 4);
  CHECK(error_line("joint\ns x1 x2 p\n0 0 0 0.5\n0 0 0 0.5\n", parse_joint) == 4);
  CHECK(error_line("jnt\n", parse_joint) == 1);
  CHECK(error_line("joint\n", parse_joint) == 0);

  std::istringstream bad("channel 2 2\na b\nx y\n0.5 0.5\n0.4 0.5\n");
  CHECK_THROWS_AS(parse_channel(bad), ParseError);
}

TEST_CASE("utility tables must be total") {
  std::istringstream partial("utility\ns a u\n0 0 1\n0 1 0\n1 0 0\n");
  CHECK_THROWS_AS(parse_utility(partial), ParseError);
  std::istringstream full("utility\ns a u\n0 0 1\n0 1 0\n1 0 0\n1 1 2\n");
  const auto u = parse_utility(full);
  CHECK(u(1, 1) == 2.0);
}

TEST_CASE("missing files raise an I/O error") {
  CHECK_THROWS_AS(read_channel_file("/nonexistent/file.txt"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/file.txt", "x"), IoError);
}
