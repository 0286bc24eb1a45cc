#include <algorithm>
#include <cmath>
#include <limits>

#include "chanorder/capability.hpp"
#include "chanorder/ui.hpp"

namespace chanorder {

namespace {

constexpr double kVertexEps = 1e-12;
constexpr std::size_t kMaxGridPoints = 20000000;

// Solves the square-or-tall system m x = rhs (m is rows x k) by Gaussian
// elimination; returns nullopt unless m has full column rank and the
// system is consistent.
std::optional<std::vector<double>> solve_full_rank(std::vector<std::vector<double>> m,
                                                   std::vector<double> rhs, std::size_t k) {
  const std::size_t rows = m.size();
  std::vector<std::size_t> pivot_row(k);
  std::size_t r = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t best = r;
    for (std::size_t i = r; i < rows; ++i) {
      if (std::abs(m[i][c]) > std::abs(m[best][c])) best = i;
    }
    if (best >= rows || std::abs(m[best][c]) < 1e-12) return std::nullopt;
    std::swap(m[best], m[r]);
    std::swap(rhs[best], rhs[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0.0) continue;
      const double f = m[i][c] / m[r][c];
      for (std::size_t cc = 0; cc < k; ++cc) m[i][cc] -= f * m[r][cc];
      rhs[i] -= f * rhs[r];
    }
    pivot_row[c] = r++;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (std::abs(rhs[i]) > 1e-12) return std::nullopt;
  }
  std::vector<double> x(k);
  for (std::size_t c = 0; c < k; ++c) x[c] = rhs[pivot_row[c]] / m[pivot_row[c]][c];
  return x;
}

struct Slice {
  double ps;
  std::vector<Matrix> vertices;
};

// I(S;A|B) = sum q log2 [ q q(b) / (q(s,b) q(a,b)) ] for the coupling
// choice `weights` (convex weights over each slice's vertices).
double evaluate(const std::vector<Slice>& slices, const std::vector<std::vector<double>>& weights,
                std::size_t na, std::size_t nb, std::vector<double>& q) {
  const std::size_t blk = na * nb;
  std::vector<double> qab(blk, 0.0), qb(nb, 0.0), qsb(slices.size() * nb, 0.0);
  for (std::size_t k = 0; k < slices.size(); ++k) {
    for (std::size_t i = 0; i < blk; ++i) {
      double v = 0.0;
      for (std::size_t w = 0; w < weights[k].size(); ++w) {
        v += weights[k][w] * slices[k].vertices[w].data()[i];
      }
      v *= slices[k].ps;
      q[k * blk + i] = v;
      qab[i] += v;
      qb[i % nb] += v;
      qsb[k * nb + i % nb] += v;
    }
  }
  double cmi = 0.0;
  for (std::size_t k = 0; k < slices.size(); ++k)
    for (std::size_t i = 0; i < blk; ++i) {
      const double v = q[k * blk + i];
      if (v <= 0.0) continue;
      const std::size_t b = i % nb;
      cmi += v * std::log2(v * qb[b] / (qsb[k * nb + b] * qab[i]));
    }
  return cmi;
}

}  // namespace

std::vector<Matrix> transportation_vertices(const std::vector<double>& rows,
                                            const std::vector<double>& cols) {
  const std::size_t r = rows.size(), c = cols.size(), n = r * c;
  const std::size_t k = std::min(n, r + c - 1);
  std::vector<Matrix> vertices;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> m(r + c, std::vector<double>(k, 0.0));
    std::vector<double> rhs(r + c);
    for (std::size_t i = 0; i < r; ++i) rhs[i] = rows[i];
    for (std::size_t j = 0; j < c; ++j) rhs[r + j] = cols[j];
    for (std::size_t v = 0; v < k; ++v) {
      m[pick[v] / c][v] = 1.0;
      m[r + pick[v] % c][v] = 1.0;
    }
    if (auto x = solve_full_rank(m, rhs, k)) {
      if (std::all_of(x->begin(), x->end(), [](double v) { return v >= -kVertexEps; })) {
        Matrix vert(r, c);
        for (std::size_t v = 0; v < k; ++v) vert(pick[v] / c, pick[v] % c) = std::max(0.0, (*x)[v]);
        const bool known = std::any_of(vertices.begin(), vertices.end(), [&](const Matrix& o) {
          return max_abs_difference(o, vert) <= kVertexEps;
        });
        if (!known) vertices.push_back(std::move(vert));
      }
    }
    // next k-subset of {0..n-1}
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return vertices;
}

double unique_information_oracle(const JointDistribution& j, Direction direction,
                                 std::size_t grid_density) {
  if (grid_density == 0) throw ValidationError("oracle grid density must be positive");
  const JointDistribution w = direction == Direction::x2_minus_x1 ? j.swapped() : j;
  const std::size_t na = w.x1().size(), nb = w.x2().size();
  const ProbVector ps = w.marginal_s();

  std::size_t dimension = 0;
  for (std::size_t s = 0; s < ps.size(); ++s) {
    if (ps[s] > 0.0) dimension += (na - 1) * (nb - 1);
  }
  if (dimension > kOracleMaxDimension) {
    throw DimensionError("oracle refuses polytopes of dimension " + std::to_string(dimension) +
                         " (limit " + std::to_string(kOracleMaxDimension) + ")");
  }

  std::vector<Slice> slices;
  std::vector<std::vector<std::vector<double>>> grids;
  double grid_points = 1.0;
  for (std::size_t s = 0; s < ps.size(); ++s) {
    if (ps[s] <= 0.0) continue;
    std::vector<double> r(na, 0.0), c(nb, 0.0);
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b) {
        r[a] += w(s, a, b) / ps[s];
        c[b] += w(s, a, b) / ps[s];
      }
    slices.push_back({ps[s], transportation_vertices(r, c)});
    grids.push_back(simplex_grid(slices.back().vertices.size(), grid_density));
    grid_points *= static_cast<double>(grids.back().size());
  }
  if (grid_points > static_cast<double>(kMaxGridPoints)) {
    throw DimensionError("oracle grid too large; lower the density");
  }

  std::vector<double> q(slices.size() * na * nb);
  std::vector<std::vector<double>> weights(slices.size());
  std::vector<std::vector<double>> best_weights;
  double best = std::numeric_limits<double>::infinity();

  // Exhaustive product over the per-slice grids.
  std::vector<std::size_t> idx(slices.size(), 0);
  while (true) {
    for (std::size_t k = 0; k < slices.size(); ++k) weights[k] = grids[k][idx[k]];
    const double v = evaluate(slices, weights, na, nb, q);
    if (v < best) {
      best = v;
      best_weights = weights;
    }
    std::size_t k = 0;
    while (k < slices.size() && ++idx[k] == grids[k].size()) idx[k++] = 0;
    if (k == slices.size()) break;
  }

  // Pattern search: move weight between two vertices of one slice.
  weights = best_weights;
  double step = 1.0 / static_cast<double>(grid_density);
  while (step > 1e-12) {
    bool improved = false;
    for (std::size_t k = 0; k < slices.size(); ++k) {
      const std::size_t nv = weights[k].size();
      for (std::size_t from = 0; from < nv; ++from)
        for (std::size_t to = 0; to < nv; ++to) {
          if (from == to || weights[k][from] <= 0.0) continue;
          const double delta = std::min(step, weights[k][from]);
          weights[k][from] -= delta;
          weights[k][to] += delta;
          const double v = evaluate(slices, weights, na, nb, q);
          if (v < best) {
            best = v;
            improved = true;
          } else {
            weights[k][from] += delta;
            weights[k][to] -= delta;
          }
        }
    }
    if (!improved) step *= 0.5;
  }
  return std::max(0.0, best);
}

}  // namespace chanorder
