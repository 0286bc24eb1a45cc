#pragma once

// Small dense linear programs: feasibility of {x >= 0 : A x = b} with
// self-verifying witnesses / Farkas certificates, and the transportation
// problem over couplings with fixed marginals.

#include <cstddef>
#include <span>
#include <vector>

#include "chanorder/core.hpp"

namespace chanorder {

inline constexpr double kFeasibilityTolerance = 1e-8;
inline constexpr double kMarginalThreshold = 1e-10;

// Raised when neither a witness nor a certificate can be verified.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

// A x = b, x >= 0 (nonnegativity implied for every variable).
class FeasibilityProblem {
 public:
  explicit FeasibilityProblem(std::size_t variables) : variables_(variables) {}

  void add_equality(std::vector<double> coefficients, double rhs);

  std::size_t variables() const { return variables_; }
  std::size_t equalities() const { return rows_.size(); }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  double rhs(std::size_t i) const { return rhs_[i]; }

 private:
  std::size_t variables_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
};

enum class FeasibilityStatus { feasible, infeasible };

struct FeasibilityOutcome {
  FeasibilityStatus status;
  // Set when feasible.
  std::vector<double> witness;
  // Set when infeasible: y with y^T A <= 0 and y^T b > 0, scaled to max |y_i| = 1.
  std::vector<double> certificate;
  // Phase-one residual fell inside (kMarginalThreshold, kFeasibilityTolerance].
  bool marginal = false;
  double phase_one_objective = 0.0;
};

// Phase-one simplex with Bland's rule. Deterministic.
FeasibilityOutcome solve_feasibility(const FeasibilityProblem& problem);

bool verify_witness(const FeasibilityProblem& problem, std::span<const double> x,
                    double tol = kFeasibilityTolerance);
bool verify_certificate(const FeasibilityProblem& problem, std::span<const double> y,
                        double tol = kFeasibilityTolerance);

struct TransportationProblem {
  ProbVector row_marginal;
  ProbVector col_marginal;
  Matrix cost;
};

struct TransportationSolution {
  Matrix plan;
  double cost = 0.0;
};

// Minimum-cost coupling; the returned plan is a vertex of the polytope.
TransportationSolution solve_transportation(const TransportationProblem& problem);
// Same, on raw marginals (each nonnegative with equal total mass).
TransportationSolution solve_transportation(std::span<const double> row_marginal,
                                            std::span<const double> col_marginal,
                                            const Matrix& cost);

}  // namespace chanorder
