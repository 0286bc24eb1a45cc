#include "chanorder/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace chanorder {

namespace {

constexpr double kPivotEps = 1e-12;
constexpr double kCostEps = 1e-12;
constexpr std::size_t kMaxPivots = 100000;

// Dense simplex tableau for A x + I a = b with artificials a, b >= 0.
// Column layout: [0, n) structural, [n, n + m) artificial, n + m rhs.
class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs,
          std::size_t n)
      : m_(rows.size()), n_(n), width_(n + rows.size() + 1), cells_(m_ * width_, 0.0),
        reduced_(n + rows.size(), 0.0), basis_(m_), active_(m_, true) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * rows[i][j];
      at(i, n_ + i) = 1.0;
      at(i, width_ - 1) = sign * rhs[i];
      basis_[i] = n_ + i;
      signs_.push_back(sign);
    }
  }

  double& at(std::size_t i, std::size_t j) { return cells_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * width_ + j]; }
  double rhs(std::size_t i) const { return at(i, width_ - 1); }

  std::size_t rows() const { return m_; }
  std::size_t structural() const { return n_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  double sign(std::size_t i) const { return signs_[i]; }
  double reduced(std::size_t j) const { return reduced_[j]; }
  bool active(std::size_t i) const { return active_[i]; }

  // Installs an objective c (indexed over all non-rhs columns) and prices
  // out the current basis.
  void set_objective(const std::vector<double>& c) {
    cost_ = c;
    for (std::size_t j = 0; j + 1 < width_; ++j) {
      double r = c[j];
      for (std::size_t i = 0; i < m_; ++i) {
        if (active_[i]) r -= c[basis_[i]] * at(i, j);
      }
      reduced_[j] = r;
    }
  }

  double objective() const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) v += cost_[basis_[i]] * rhs(i);
    }
    return v;
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) /= p;
    at(row, col) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = at(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
    const double f = reduced_[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j + 1 < width_; ++j) reduced_[j] -= f * at(row, j);
      reduced_[col] = 0.0;
    }
    basis_[row] = col;
  }

  // Bland's rule over columns [0, limit). Returns false if unbounded.
  bool optimize(std::size_t limit) {
    for (std::size_t iter = 0; iter < kMaxPivots; ++iter) {
      std::optional<std::size_t> entering;
      for (std::size_t j = 0; j < limit; ++j) {
        if (reduced_[j] < -kCostEps) {
          entering = j;
          break;
        }
      }
      if (!entering) return true;
      std::optional<std::size_t> leaving;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (!active_[i]) continue;
        const double a = at(i, *entering);
        if (a <= kPivotEps) continue;
        const double ratio = std::max(0.0, rhs(i)) / a;
        if (!leaving || ratio < best - 1e-15) {
          best = ratio;
          leaving = i;
        } else if (ratio <= best + 1e-15 && basis_[i] < basis_[*leaving]) {
          best = std::min(best, ratio);
          leaving = i;
        }
      }
      if (!leaving) return false;
      pivot(*leaving, *entering);
    }
    throw IllConditionedError("simplex: pivot limit reached (cycling)");
  }

  // After phase one: pivot zero-level artificials out of the basis, and
  // deactivate rows that turn out to be redundant.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      std::optional<std::size_t> col;
      double best = kPivotEps * 1e3;
      for (std::size_t j = 0; j < n_; ++j) {
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          col = j;
        }
      }
      if (col) {
        pivot(i, *col);
      } else {
        active_[i] = false;
      }
    }
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i] && basis_[i] < n_) x[basis_[i]] = rhs(i);
    }
    return x;
  }

 private:
  std::size_t m_, n_, width_;
  std::vector<double> cells_;
  std::vector<double> reduced_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
  std::vector<double> signs_;
  std::vector<bool> active_;
};

std::vector<double> phase_one_costs(std::size_t n, std::size_t m) {
  std::vector<double> c(n + m, 0.0);
  std::fill(c.begin() + static_cast<std::ptrdiff_t>(n), c.end(), 1.0);
  return c;
}

}  // namespace

void FeasibilityProblem::add_equality(std::vector<double> coefficients, double rhs) {
  if (coefficients.size() != variables_) {
    throw DimensionError("equality row length differs from the variable count");
  }
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw ValidationError("non-finite coefficient");
  }
  if (!std::isfinite(rhs)) throw ValidationError("non-finite right-hand side");
  rows_.push_back(std::move(coefficients));
  rhs_.push_back(rhs);
}

bool verify_witness(const FeasibilityProblem& problem, std::span<const double> x, double tol) {
  if (x.size() != problem.variables()) return false;
  for (double v : x) {
    if (!std::isfinite(v) || v < -kMarginalThreshold) return false;
  }
  for (std::size_t i = 0; i < problem.equalities(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += problem.row(i)[j] * x[j];
    if (std::abs(lhs - problem.rhs(i)) > tol) return false;
  }
  return true;
}

bool verify_certificate(const FeasibilityProblem& problem, std::span<const double> y, double tol) {
  if (y.size() != problem.equalities()) return false;
  double yb = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) return false;
    yb += y[i] * problem.rhs(i);
  }
  if (!(yb > 0.0)) return false;
  for (std::size_t j = 0; j < problem.variables(); ++j) {
    double ya = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) ya += y[i] * problem.row(i)[j];
    if (ya > tol) return false;
  }
  return true;
}

FeasibilityOutcome solve_feasibility(const FeasibilityProblem& problem) {
  const std::size_t n = problem.variables();
  const std::size_t m = problem.equalities();
  std::vector<std::vector<double>> rows(m);
  std::vector<double> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    rows[i] = problem.row(i);
    rhs[i] = problem.rhs(i);
  }

  Tableau t(rows, rhs, n);
  t.set_objective(phase_one_costs(n, m));
  t.optimize(n);

  FeasibilityOutcome out;
  out.phase_one_objective = std::max(0.0, t.objective());

  if (out.phase_one_objective <= kFeasibilityTolerance) {
    std::vector<double> x = t.solution();
    for (double& v : x) {
      if (v < 0.0 && v >= -kMarginalThreshold) v = 0.0;
    }
    if (!verify_witness(problem, x)) {
      throw IllConditionedError("feasibility: phase-one optimum does not verify as a witness");
    }
    out.status = FeasibilityStatus::feasible;
    out.witness = std::move(x);
    out.marginal = out.phase_one_objective > kMarginalThreshold;
    return out;
  }

  // Reduced cost of artificial i is 1 - y'_i for the sign-normalized system.
  std::vector<double> y(m);
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = t.sign(i) * (1.0 - t.reduced(n + i));
    scale = std::max(scale, std::abs(y[i]));
  }
  if (scale > 0.0) {
    for (double& v : y) v /= scale;
  }
  if (!verify_certificate(problem, y)) {
    throw IllConditionedError("feasibility: infeasibility certificate does not verify");
  }
  out.status = FeasibilityStatus::infeasible;
  out.certificate = std::move(y);
  return out;
}

TransportationSolution solve_transportation(const TransportationProblem& problem) {
  return solve_transportation(problem.row_marginal.mass(), problem.col_marginal.mass(),
                              problem.cost);
}

TransportationSolution solve_transportation(std::span<const double> row_marginal,
                                            std::span<const double> col_marginal,
                                            const Matrix& cost) {
  const std::size_t r = row_marginal.size(), c = col_marginal.size();
  if (cost.rows() != r || cost.cols() != c) {
    throw DimensionError("transportation cost shape does not match the marginals");
  }
  double row_total = 0.0, col_total = 0.0;
  for (double v : row_marginal) row_total += v;
  for (double v : col_marginal) col_total += v;
  if (std::abs(row_total - col_total) > kProbTolerance) {
    throw ValidationError("transportation marginals have different total mass");
  }
  const std::size_t n = r * c;
  // Row-sum constraints plus all but the last column-sum constraint; the
  // dropped one is implied by equal total mass.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<double> row(n, 0.0);
    for (std::size_t j = 0; j < c; ++j) row[i * c + j] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(row_marginal[i]);
  }
  for (std::size_t j = 0; j + 1 < c; ++j) {
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < r; ++i) row[i * c + j] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(col_marginal[j]);
  }

  const std::size_t m = rows.size();
  Tableau t(rows, rhs, n);
  t.set_objective(phase_one_costs(n, m));
  t.optimize(n);
  t.expel_artificials();

  std::vector<double> c2(n + m, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) c2[i * c + j] = cost(i, j);
  t.set_objective(c2);
  if (!t.optimize(n)) throw IllConditionedError("transportation: unbounded (impossible)");

  const std::vector<double> x = t.solution();
  TransportationSolution out;
  out.plan = Matrix(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double v = std::max(0.0, x[i * c + j]);
      out.plan(i, j) = v;
      out.cost += v * cost(i, j);
    }
  return out;
}

}  // namespace chanorder
