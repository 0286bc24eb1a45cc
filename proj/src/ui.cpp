#include "chanorder/ui.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "chanorder/blackwell.hpp"
#include "chanorder/lp.hpp"

namespace chanorder {

namespace {

constexpr double kEmptySlope = 1e6;
constexpr int kSinkhornSweeps = 5;
constexpr int kNewtonSteps = 100;
constexpr double kInitialOverRelaxation = 1.5;
constexpr double kMaxOverRelaxation = 64.0;
constexpr double kSinkhornTolerance = 1e-15;
constexpr double kProjectionTolerance = 1e-12;

// Per-state coupling constraints of the working joint (S, A, B), where A is
// the variable whose unique information is measured and B the other one.
// Couplings are stored flat: index (k * na + a) * nb + b for the k-th
// state of positive probability.
struct Polytope {
  std::vector<std::size_t> states;
  std::vector<double> ps;
  std::vector<std::vector<double>> rows;  // P(a|s)
  std::vector<std::vector<double>> cols;  // P(b|s)
  std::size_t na = 0, nb = 0;
  std::vector<double> log_s_given_b;  // log2 Q(s|b), fixed on the polytope
  std::vector<double> log_open;  // log2 of the number of states that can use cell (a, b)

  std::size_t block() const { return na * nb; }
  std::size_t dim() const { return states.size() * block(); }
};

Polytope make_polytope(const JointDistribution& w) {
  Polytope p;
  p.na = w.x1().size();
  p.nb = w.x2().size();
  const ProbVector ps = w.marginal_s();
  std::vector<double> qb(p.nb, 0.0), qsb;
  for (std::size_t s = 0; s < ps.size(); ++s) {
    if (ps[s] <= 0.0) continue;
    p.states.push_back(s);
    p.ps.push_back(ps[s]);
    std::vector<double> r(p.na, 0.0), c(p.nb, 0.0);
    for (std::size_t a = 0; a < p.na; ++a)
      for (std::size_t b = 0; b < p.nb; ++b) {
        r[a] += w(s, a, b) / ps[s];
        c[b] += w(s, a, b) / ps[s];
      }
    for (std::size_t b = 0; b < p.nb; ++b) {
      qb[b] += ps[s] * c[b];
      qsb.push_back(ps[s] * c[b]);
    }
    p.rows.push_back(std::move(r));
    p.cols.push_back(std::move(c));
  }
  std::vector<int> open(p.na * p.nb, 0);
  for (std::size_t k = 0; k < p.states.size(); ++k)
    for (std::size_t a = 0; a < p.na; ++a)
      for (std::size_t b = 0; b < p.nb; ++b)
        if (p.rows[k][a] > 0.0 && p.cols[k][b] > 0.0) ++open[a * p.nb + b];
  for (int n : open) p.log_open.push_back(n > 1 ? std::log2(static_cast<double>(n)) : 0.0);
  for (std::size_t i = 0; i < qsb.size(); ++i) {
    const double v = qsb[i];
    p.log_s_given_b.push_back(v > 0.0 ? std::log2(v / qb[i % p.nb]) : 0.0);
  }
  return p;
}

// I_Q(S;A|B).
double objective(const Polytope& p, const std::vector<double>& t, std::vector<double>& qab) {
  const std::size_t blk = p.block();
  std::fill(qab.begin(), qab.end(), 0.0);
  for (std::size_t k = 0; k < p.states.size(); ++k)
    for (std::size_t i = 0; i < blk; ++i) qab[i] += p.ps[k] * t[k * blk + i];
  // Summed as q log [Q(s|a,b) / Q(s|b)] rather than as a difference of
  // entropies, which loses everything below ~1e-16 bits to cancellation.
  double value = 0.0;
  for (std::size_t k = 0; k < p.states.size(); ++k)
    for (std::size_t i = 0; i < blk; ++i) {
      const double q = p.ps[k] * t[k * blk + i];
      if (q > 0.0) value += q * (std::log2(q / qab[i]) - p.log_s_given_b[k * p.nb + i % p.nb]);
    }
  return value;
}

// d objective / d t(k, a, b) = P(s) log2 Q(s | a, b). At a cell with
// Q(a, b) = 0 the objective is not differentiable: sending mass m_s into it
// from several states changes the objective at rate sum m_s log2(m_s / m),
// which is at least -m log2(#states able to use the cell). Using that bound
// as the slope keeps the linear model below the objective, so the
// Frank-Wolfe gap still bounds the suboptimality from above.
void gradient(const Polytope& p, const std::vector<double>& t, std::vector<double>& qab,
              std::vector<double>& grad) {
  const std::size_t blk = p.block();
  std::fill(qab.begin(), qab.end(), 0.0);
  for (std::size_t k = 0; k < p.states.size(); ++k)
    for (std::size_t i = 0; i < blk; ++i) qab[i] += p.ps[k] * t[k * blk + i];
  for (std::size_t k = 0; k < p.states.size(); ++k)
    for (std::size_t i = 0; i < blk; ++i) {
      if (qab[i] <= 0.0) {
        grad[k * blk + i] = -p.ps[k] * p.log_open[i];
        continue;
      }
      const double q = p.ps[k] * t[k * blk + i];
      // An emptied cell next to occupied ones has slope -infinity; a huge
      // finite stand-in keeps the transportation LP well defined.
      grad[k * blk + i] =
          q > 0.0 ? p.ps[k] * std::min(0.0, std::log2(q) - std::log2(qab[i])) : -p.ps[k] * kEmptySlope;
    }
}

// Solves h x = rhs in place by Gaussian elimination with partial pivoting;
// false when h is numerically singular.
bool solve_dense(std::vector<std::vector<double>>& h, std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(h[i][c]) > std::abs(h[piv][c])) piv = i;
    if (!(std::abs(h[piv][c]) > 0.0)) return false;
    std::swap(h[piv], h[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = h[i][c] / h[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) h[i][k] -= f * h[c][k];
      rhs[i] -= f * rhs[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t k = c + 1; k < n; ++k) rhs[c] -= h[c][k] * rhs[k];
    rhs[c] /= h[c][c];
  }
  return true;
}

double marginal_residual(const std::vector<double>& m, const std::vector<double>& rows,
                         const std::vector<double>& cols, std::vector<double>& g) {
  const std::size_t na = rows.size(), nb = cols.size();
  g.assign(na + nb, 0.0);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      g[a] += m[a * nb + b];
      g[na + b] += m[a * nb + b];
    }
  double worst = 0.0;
  for (std::size_t a = 0; a < na; ++a) worst = std::max(worst, std::abs(g[a] -= rows[a]));
  for (std::size_t b = 0; b < nb; ++b) worst = std::max(worst, std::abs(g[na + b] -= cols[b]));
  return worst;
}

// I-projection of the kernel m (na x nb, flat) onto the couplings with the
// given row and column sums: m <- diag(e^alpha) m diag(e^beta). A few
// Sinkhorn sweeps, then Newton's method on the dual, which stays fast when
// the projection is nearly singular (where Sinkhorn crawls). Returns the
// largest remaining marginal deviation.
double scale_to_marginals(std::vector<double>& m, const std::vector<double>& rows,
                          const std::vector<double>& cols) {
  const std::size_t na = rows.size(), nb = cols.size();
  for (int sweep = 0; sweep < kSinkhornSweeps; ++sweep) {
    for (std::size_t a = 0; a < na; ++a) {
      double sum = 0.0;
      for (std::size_t b = 0; b < nb; ++b) sum += m[a * nb + b];
      const double f = sum > 0.0 ? rows[a] / sum : 0.0;
      for (std::size_t b = 0; b < nb; ++b) m[a * nb + b] *= f;
    }
    for (std::size_t b = 0; b < nb; ++b) {
      double sum = 0.0;
      for (std::size_t a = 0; a < na; ++a) sum += m[a * nb + b];
      const double f = sum > 0.0 ? cols[b] / sum : 0.0;
      for (std::size_t a = 0; a < na; ++a) m[a * nb + b] *= f;
    }
  }

  // Newton variables: alpha for rows with positive sum, beta for columns
  // with positive sum except the last one (the scaling has one redundant
  // degree of freedom).
  std::vector<std::size_t> var_of(na + nb, SIZE_MAX), live;
  for (std::size_t i = 0; i < na + nb; ++i) {
    if ((i < na ? rows[i] : cols[i - na]) > 0.0) live.push_back(i);
  }
  if (!live.empty() && live.back() >= na) live.pop_back();
  for (std::size_t v = 0; v < live.size(); ++v) var_of[live[v]] = v;

  std::vector<double> g, trial(m.size()), g_trial;
  double worst = marginal_residual(m, rows, cols, g);
  for (int it = 0; it < kNewtonSteps && worst > kSinkhornTolerance; ++it) {
    const std::size_t n = live.size();
    std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
    std::vector<double> step(n);
    for (std::size_t v = 0; v < n; ++v) step[v] = -g[live[v]];
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b) {
        const double q = m[a * nb + b];
        const std::size_t va = var_of[a], vb = var_of[na + b];
        if (va != SIZE_MAX) h[va][va] += q;
        if (vb != SIZE_MAX) h[vb][vb] += q;
        if (va != SIZE_MAX && vb != SIZE_MAX) {
          h[va][vb] += q;
          h[vb][va] += q;
        }
      }
    if (!solve_dense(h, step)) break;
    bool accepted = false;
    for (double scale = 1.0; scale > 1e-12; scale *= 0.5) {
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
          const std::size_t va = var_of[a], vb = var_of[na + b];
          const double e = (va != SIZE_MAX ? step[va] : 0.0) + (vb != SIZE_MAX ? step[vb] : 0.0);
          trial[a * nb + b] = m[a * nb + b] * std::exp(scale * e);
        }
      const double w = marginal_residual(trial, rows, cols, g_trial);
      if (w < worst) {
        m.swap(trial);
        g.swap(g_trial);
        worst = w;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return worst;
}

// Q(a | b) of the joint built from t; zero where Q(b) = 0.
std::vector<double> markov_kernel(const Polytope& p, const std::vector<double>& t) {
  const std::size_t blk = p.block();
  std::vector<double> r(blk, 0.0), qb(p.nb, 0.0);
  for (std::size_t k = 0; k < p.states.size(); ++k)
    for (std::size_t i = 0; i < blk; ++i) r[i] += p.ps[k] * t[k * blk + i];
  for (std::size_t i = 0; i < blk; ++i) qb[i % p.nb] += r[i];
  for (std::size_t i = 0; i < blk; ++i) r[i] = qb[i % p.nb] > 0.0 ? r[i] / qb[i % p.nb] : 0.0;
  return r;
}

// Alternating minimization of D(Q || R) over Q in the polytope and R with
// S - B - A Markov and R(s, b) = P(s, b). For fixed Q the best R is
// P(s, b) Q(a | b), and the divergence is then exactly I_Q(S;A|B); for fixed
// R = P(s, b) r(a | b) the best Q is its I-projection, i.e. each slice
// Sinkhorn-scaled to the polytope's marginals.
// False when Sinkhorn could not meet the marginals to kProjectionTolerance.
bool project(const Polytope& p, const std::vector<double>& r, std::vector<double>& t) {
  const std::size_t blk = p.block();
  std::vector<double> m(blk);
  bool ok = true;
  for (std::size_t k = 0; k < p.states.size(); ++k) {
    for (std::size_t i = 0; i < blk; ++i) m[i] = p.cols[k][i % p.nb] * r[i];
    ok = scale_to_marginals(m, p.rows[k], p.cols[k]) <= kProjectionTolerance && ok;
    std::copy(m.begin(), m.end(), t.begin() + static_cast<std::ptrdiff_t>(k * blk));
  }
  return ok;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Exact linear minimization over the product of transportation polytopes.
std::vector<double> linear_minimizer(const Polytope& p, const std::vector<double>& grad) {
  const std::size_t blk = p.block();
  std::vector<double> v(p.dim());
  Matrix cost(p.na, p.nb);
  for (std::size_t k = 0; k < p.states.size(); ++k) {
    for (std::size_t i = 0; i < blk; ++i) cost.data()[i] = grad[k * blk + i];
    const TransportationSolution sol = solve_transportation(p.rows[k], p.cols[k], cost);
    std::copy(sol.plan.data().begin(), sol.plan.data().end(),
              v.begin() + static_cast<std::ptrdiff_t>(k * blk));
  }
  return v;
}

MarginalPolytopePoint to_point(const Polytope& p, const std::vector<double>& t, bool swapped) {
  MarginalPolytopePoint out;
  out.states = p.states;
  for (std::size_t k = 0; k < p.states.size(); ++k) {
    Matrix m = swapped ? Matrix(p.nb, p.na) : Matrix(p.na, p.nb);
    for (std::size_t a = 0; a < p.na; ++a)
      for (std::size_t b = 0; b < p.nb; ++b) {
        const double v = t[(k * p.na + a) * p.nb + b];
        if (swapped) {
          m(b, a) = v;
        } else {
          m(a, b) = v;
        }
      }
    out.couplings.push_back(std::move(m));
  }
  return out;
}

}  // namespace

const char* to_string(Direction d) {
  return d == Direction::x1_minus_x2 ? "x1_minus_x2" : "x2_minus_x1";
}

JointDistribution MarginalPolytopePoint::joint(const JointDistribution& p) const {
  const ProbVector ps = p.marginal_s();
  const std::size_t n1 = p.x1().size(), n2 = p.x2().size();
  std::vector<double> m(p.mass().size(), 0.0);
  for (std::size_t k = 0; k < states.size(); ++k)
    for (std::size_t a = 0; a < n1; ++a)
      for (std::size_t b = 0; b < n2; ++b)
        m[(states[k] * n1 + a) * n2 + b] = ps[states[k]] * couplings[k](a, b);
  return JointDistribution(p.s(), p.x1(), p.x2(), std::move(m));
}

double MarginalPolytopePoint::constraint_violation(const JointDistribution& p) const {
  const ProbVector ps = p.marginal_s();
  const Matrix p1 = p.pair_marginal(Output::x1);
  const Matrix p2 = p.pair_marginal(Output::x2);
  double worst = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::size_t s = states[k];
    const Matrix& c = couplings[k];
    for (std::size_t a = 0; a < c.rows(); ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < c.cols(); ++b) {
        row += c(a, b);
        if (c(a, b) < 0.0) worst = std::max(worst, -c(a, b));
      }
      worst = std::max(worst, std::abs(row - p1(s, a) / ps[s]));
    }
    for (std::size_t b = 0; b < c.cols(); ++b) {
      double col = 0.0;
      for (std::size_t a = 0; a < c.rows(); ++a) col += c(a, b);
      worst = std::max(worst, std::abs(col - p2(s, b) / ps[s]));
    }
  }
  return worst;
}

UIResult unique_information(const JointDistribution& j, Direction direction,
                            double tolerance_bits, std::size_t max_iterations) {
  UIOptions options;
  options.tolerance = tolerance_bits;
  options.max_iterations = max_iterations;
  return unique_information(j, direction, options);
}

UIResult unique_information(const JointDistribution& j, Direction direction,
                            const UIOptions& options) {
  if (!(options.tolerance > 0.0)) throw ValidationError("UI tolerance must be positive");
  const bool swapped = direction == Direction::x2_minus_x1;
  const JointDistribution work = swapped ? j.swapped() : j;
  const Polytope p = make_polytope(work);
  const std::size_t blk = p.block();

  // Start from the coupling that makes A and B independent given S.
  std::vector<double> t(p.dim());
  for (std::size_t k = 0; k < p.states.size(); ++k)
    for (std::size_t a = 0; a < p.na; ++a)
      for (std::size_t b = 0; b < p.nb; ++b)
        t[(k * p.na + a) * p.nb + b] = p.rows[k][a] * p.cols[k][b];
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> r = markov_kernel(p, t);
  double omega = kInitialOverRelaxation;

  std::vector<double> qab(blk), grad(p.dim()), d(p.dim());
  UIResult result;
  double value = objective(p, t, qab);
  double gap = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;

  for (;; ++iter) {
    gradient(p, t, qab, grad);
    const std::vector<double> fw_vertex = linear_minimizer(p, grad);
    gap = std::max(0.0, dot(grad, t) - dot(grad, fw_vertex));

    if (options.observer) {
      const MarginalPolytopePoint point = to_point(p, t, swapped);
      options.observer(UIProgress{iter, value, gap, point});
    }
    if (gap <= options.tolerance) {
      result.converged = true;
      break;
    }
    if (iter >= options.max_iterations) break;

    // Plain alternating step, then an over-relaxed one that moves the
    // kernel further along the same (log-domain) direction; the better of
    // the two is kept, so the objective never increases.
    std::vector<double> plain(p.dim());
    const bool plain_ok = project(p, r, plain);
    const double plain_value = plain_ok ? objective(p, plain, qab) : inf;
    const std::vector<double> r_plain = markov_kernel(p, plain);

    std::vector<double> r_ext(blk), qb(p.nb, 0.0);
    for (std::size_t i = 0; i < blk; ++i) {
      r_ext[i] = r[i] > 0.0 && r_plain[i] > 0.0 ? r[i] * std::pow(r_plain[i] / r[i], omega)
                                                : r_plain[i];
      qb[i % p.nb] += r_ext[i];
    }
    for (std::size_t i = 0; i < blk; ++i) r_ext[i] = qb[i % p.nb] > 0.0 ? r_ext[i] / qb[i % p.nb] : 0.0;
    std::vector<double> extrapolated(p.dim());
    const bool ext_ok = project(p, r_ext, extrapolated);
    const double ext_value = ext_ok ? objective(p, extrapolated, qab) : inf;
    if (!plain_ok && !ext_ok) break;

    if (ext_value < plain_value) {
      t = std::move(extrapolated);
      value = ext_value;
      r = markov_kernel(p, t);
      omega = std::min(omega * 1.5, kMaxOverRelaxation);
    } else if (plain_ok) {
      t = std::move(plain);
      value = plain_value;
      r = r_plain;
      omega = std::max(kInitialOverRelaxation, omega / 2.0);
    } else {
      break;  // no representable progress
    }
  }

  result.optimizer = to_point(p, t, swapped);
  const JointDistribution q = result.optimizer.joint(j);
  result.value = conditional_mutual_information(swapped ? q.swapped() : q);
  result.duality_gap = gap;
  result.iterations = iter;
  return result;
}

}  // namespace chanorder

namespace chanorder {

EquivalenceReport ui_blackwell_equivalence_check(const JointDistribution& j, Direction direction,
                                                 double tolerance) {
  const JointDistribution support = restrict_to_support(j);
  const Output first = direction == Direction::x1_minus_x2 ? Output::x1 : Output::x2;
  const Output second = direction == Direction::x1_minus_x2 ? Output::x2 : Output::x1;

  EquivalenceReport report;
  report.tolerance = tolerance;
  report.ui = unique_information(support, direction);
  report.witness =
      test_garbling(channel_from_joint(support, first), channel_from_joint(support, second));
  report.ui_vanishes = report.ui.value <= tolerance;
  report.agree = report.ui_vanishes == report.witness.has_value();
  return report;
}

}  // namespace chanorder
