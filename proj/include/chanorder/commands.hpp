#pragma once

// The command-line front end as plain functions over streams, so that the
// executable is a thin argument parser and the commands are testable.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chanorder/rational.hpp"
#include "chanorder/ui.hpp"

namespace chanorder {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitIncomparable = 10;
inline constexpr int kExitNotConverged = 11;

struct CompareArgs {
  std::filesystem::path first;
  std::filesystem::path second;
  std::optional<std::filesystem::path> prior;  // uniform when absent
};
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

struct DecideArgs {
  std::filesystem::path channel;
  std::filesystem::path prior;
  std::filesystem::path utility;
};
int cmd_decide(const DecideArgs& args, std::ostream& out, std::ostream& err);

struct UiArgs {
  std::optional<std::filesystem::path> joint;
  std::optional<std::string> scenario;  // alternative to a joint file
  std::string direction = "both";       // both | x1 | x2
  double tolerance = kDefaultUITolerance;
  std::size_t max_iterations = kDefaultUIMaxIterations;
};
int cmd_ui(const UiArgs& args, std::ostream& out, std::ostream& err);

struct HeatmapCell {
  Rational a, b;
  UIResult x1_minus_x2;
  UIResult x2_minus_x1;
};

struct HeatmapGrid {
  std::string family;
  std::vector<Rational> a_values;
  std::vector<Rational> b_values;
  // a-major; nullopt where (a, b) is outside the family's range.
  std::vector<std::optional<HeatmapCell>> cells;

  const std::optional<HeatmapCell>& at(std::size_t ia, std::size_t ib) const {
    return cells[ia * b_values.size() + ib];
  }
};

// family: "and-grid" (a in [-1/8, 1/8], b in [-1/16, 1/16]) or "and-det"
// (a, b in [0, 1]); `resolution` equally spaced exact values per axis.
// Cells are evaluated on `threads` workers (0 = hardware concurrency).
HeatmapGrid compute_heatmap(const std::string& family, std::size_t resolution,
                            double tolerance = kDefaultUITolerance, unsigned threads = 0);
void write_heatmap_csv(std::ostream& out, const HeatmapGrid& grid);

struct HeatmapArgs {
  std::string family;
  std::size_t resolution = 17;
  std::filesystem::path out;
  double tolerance = kDefaultUITolerance;
  unsigned threads = 0;
};
int cmd_heatmap(const HeatmapArgs& args, std::ostream& out, std::ostream& err);

struct ExampleArgs {
  std::string name;
  std::optional<std::filesystem::path> out_dir;  // also write the tables as files
};
int cmd_example(const ExampleArgs& args, std::ostream& out, std::ostream& err);

struct CapacityArgs {
  std::filesystem::path channel;
  double tolerance = 1e-9;
};
int cmd_capacity(const CapacityArgs& args, std::ostream& out, std::ostream& err);

struct MoreCapableArgs {
  std::filesystem::path first;
  std::filesystem::path second;
  std::size_t grid = 50;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
};
int cmd_more_capable(const MoreCapableArgs& args, std::ostream& out, std::ostream& err);

// "%.12g"
std::string format_value(double x);

}  // namespace chanorder
