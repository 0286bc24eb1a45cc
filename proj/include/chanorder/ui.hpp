#pragma once

// Unique information UI(S; X1 \ X2): the minimum of I_Q(S; X1 | X2) over all
// joints Q sharing the (S, X1) and (S, X2) marginals of P.
//
// That set factors over the states s with P(s) > 0 into transportation
// polytopes of couplings Q(x1, x2 | s) with row sums P(x1|s) and column sums
// P(x2|s). Iterates move by alternating I-projections (Sinkhorn scaling per
// state, over-relaxed when that helps), which stay strictly inside the
// polytope. Each iterate is certified by its Frank-Wolfe gap, computed from
// exact transportation LPs; by convexity the gap bounds the distance of the
// returned value to the minimum.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "chanorder/core.hpp"

namespace chanorder {

enum class Direction {
  x1_minus_x2,  // UI(S; X1 \ X2)
  x2_minus_x1,  // UI(S; X2 \ X1)
};

const char* to_string(Direction d);

// A point of the marginal polytope, one coupling per state of positive
// probability. Couplings are always indexed (x1, x2) regardless of the
// direction they were computed for.
struct MarginalPolytopePoint {
  std::vector<std::size_t> states;
  std::vector<Matrix> couplings;

  // Q(s, x1, x2) = P(s) Q(x1, x2 | s).
  JointDistribution joint(const JointDistribution& p) const;
  // Largest row/column-sum deviation from the constraints P(x1|s), P(x2|s).
  double constraint_violation(const JointDistribution& p) const;
};

struct UIResult {
  double value = 0.0;  // bits
  MarginalPolytopePoint optimizer;
  double duality_gap = 0.0;  // bits
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr double kDefaultUITolerance = 1e-7;
inline constexpr std::size_t kDefaultUIMaxIterations = 10000;

struct UIProgress {
  std::size_t iteration;
  double objective;
  double gap;
  const MarginalPolytopePoint& iterate;
};

struct UIOptions {
  double tolerance = kDefaultUITolerance;
  std::size_t max_iterations = kDefaultUIMaxIterations;
  // Called once per iterate (including the starting point) when set.
  std::function<void(const UIProgress&)> observer;
};

// Never throws on non-convergence: returns converged = false with the last
// (and best) iterate.
UIResult unique_information(const JointDistribution& j, Direction direction,
                            const UIOptions& options = {});
UIResult unique_information(const JointDistribution& j, Direction direction, double tolerance_bits,
                            std::size_t max_iterations = kDefaultUIMaxIterations);

inline constexpr std::size_t kOracleMaxDimension = 6;

// Brute-force upper bound on UI for small instances: every combination of
// per-state polytope vertices on a grid of the given density, refined by a
// derivative-free pattern search. Throws DimensionError when the polytope
// dimension exceeds kOracleMaxDimension.
double unique_information_oracle(const JointDistribution& j, Direction direction,
                                 std::size_t grid_density);

// Vertices of {Q >= 0 : row sums = rows, column sums = cols}, found by
// brute force over candidate supports.
std::vector<Matrix> transportation_vertices(const std::vector<double>& rows,
                                            const std::vector<double>& cols);

struct EquivalenceReport {
  UIResult ui;
  std::optional<Channel> witness;  // garbling witness for the direction
  double tolerance = 0.0;
  bool ui_vanishes = false;
  bool agree = false;
};

// Runs the UI solver and the garbling LP on the induced channels (restricted
// to states of positive probability) and records whether
// "UI <= tolerance" coincides with "witness exists". Disagreements are
// reported, not resolved.
EquivalenceReport ui_blackwell_equivalence_check(const JointDistribution& j, Direction direction,
                                                 double tolerance);

}  // namespace chanorder
