#include "chanorder/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace chanorder {

namespace {

void check_distribution(std::span<const double> mass, const char* what) {
  double total = 0.0;
  for (double m : mass) {
    if (!std::isfinite(m) || m < 0.0) {
      throw ValidationError(std::string(what) + ": negative or non-finite mass");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw ValidationError(std::string(what) + ": masses sum to " + std::to_string(total) +
                          ", not 1");
  }
}

double plogp_sum(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("alphabet must contain at least one symbol");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw ValidationError("alphabet labels must be non-empty");
    if (!seen.insert(l).second) throw ValidationError("duplicate alphabet label '" + l + "'");
  }
}

Alphabet Alphabet::range(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return Alphabet(std::move(labels));
}

std::optional<std::size_t> Alphabet::find(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t Alphabet::index(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw ValidationError("unknown symbol '" + std::string(label) + "'");
}

// ---------------------------------------------------------------- Matrix

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix multiply(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols() != rhs.rows()) throw DimensionError("matrix product: inner dimensions differ");
  Matrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("matrix comparison: shapes differ");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  }
  return d;
}

bool is_column_stochastic(const Matrix& m, double tol) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double v = m(r, c);
      if (!std::isfinite(v) || v < 0.0) return false;
      total += v;
    }
    if (std::abs(total - 1.0) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------- ProbVector

ProbVector::ProbVector(Alphabet alphabet, std::vector<double> mass)
    : alphabet_(std::move(alphabet)), mass_(std::move(mass)) {
  if (mass_.size() != alphabet_.size()) {
    throw DimensionError("probability vector length does not match its alphabet");
  }
  check_distribution(mass_, "probability vector");
}

ProbVector ProbVector::uniform(Alphabet alphabet) {
  const std::size_t n = alphabet.size();
  return ProbVector(std::move(alphabet), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::point_mass(Alphabet alphabet, std::size_t index) {
  std::vector<double> m(alphabet.size(), 0.0);
  m.at(index) = 1.0;
  return ProbVector(std::move(alphabet), std::move(m));
}

ProbVector ProbVector::normalized(Alphabet alphabet, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("weights must be nonnegative");
    total += w;
  }
  if (total <= 0.0) throw ValidationError("cannot normalize zero weights");
  for (double& w : weights) w /= total;
  return ProbVector(std::move(alphabet), std::move(weights));
}

bool ProbVector::has_full_support() const {
  return std::all_of(mass_.begin(), mass_.end(), [](double m) { return m > 0.0; });
}

// ---------------------------------------------------------------- Channel

Channel::Channel(Alphabet input, Alphabet output, Matrix matrix)
    : input_(std::move(input)), output_(std::move(output)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != output_.size() || matrix_.cols() != input_.size()) {
    throw DimensionError("channel matrix shape does not match its alphabets");
  }
  if (!is_column_stochastic(matrix_)) {
    throw ValidationError("channel matrix is not column-stochastic");
  }
}

Channel Channel::identity(const Alphabet& alphabet) {
  return Channel(alphabet, alphabet, Matrix::identity(alphabet.size()));
}

Channel Channel::constant(const Alphabet& input, const ProbVector& column) {
  Matrix m(column.size(), input.size());
  for (std::size_t s = 0; s < input.size(); ++s) {
    for (std::size_t x = 0; x < column.size(); ++x) m(x, s) = column[x];
  }
  return Channel(input, column.alphabet(), std::move(m));
}

// ---------------------------------------------------------------- JointDistribution

JointDistribution::JointDistribution(Alphabet s, Alphabet x1, Alphabet x2, std::vector<double> mass)
    : s_(std::move(s)), x1_(std::move(x1)), x2_(std::move(x2)), mass_(std::move(mass)) {
  if (mass_.size() != s_.size() * x1_.size() * x2_.size()) {
    throw DimensionError("joint mass table size does not match its alphabets");
  }
  check_distribution(mass_, "joint distribution");
}

ProbVector JointDistribution::marginal_s() const {
  std::vector<double> m(s_.size(), 0.0);
  for (std::size_t s = 0; s < s_.size(); ++s)
    for (std::size_t a = 0; a < x1_.size(); ++a)
      for (std::size_t b = 0; b < x2_.size(); ++b) m[s] += (*this)(s, a, b);
  return ProbVector(s_, std::move(m));
}

ProbVector JointDistribution::marginal(Output which) const {
  const Matrix pair = pair_marginal(which);
  std::vector<double> m(pair.cols(), 0.0);
  for (std::size_t s = 0; s < pair.rows(); ++s)
    for (std::size_t x = 0; x < pair.cols(); ++x) m[x] += pair(s, x);
  return ProbVector(output(which), std::move(m));
}

Matrix JointDistribution::pair_marginal(Output which) const {
  Matrix out(s_.size(), output(which).size());
  for (std::size_t s = 0; s < s_.size(); ++s)
    for (std::size_t a = 0; a < x1_.size(); ++a)
      for (std::size_t b = 0; b < x2_.size(); ++b)
        out(s, which == Output::x1 ? a : b) += (*this)(s, a, b);
  return out;
}

JointDistribution JointDistribution::swapped() const {
  std::vector<double> m(mass_.size());
  for (std::size_t s = 0; s < s_.size(); ++s)
    for (std::size_t a = 0; a < x1_.size(); ++a)
      for (std::size_t b = 0; b < x2_.size(); ++b)
        m[(s * x2_.size() + b) * x1_.size() + a] = (*this)(s, a, b);
  return JointDistribution(s_, x2_, x1_, std::move(m));
}

// ---------------------------------------------------------------- CoarseGraining

CoarseGraining::CoarseGraining(Alphabet domain, Alphabet codomain,
                               std::vector<std::size_t> assignment)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), assignment_(std::move(assignment)) {
  if (assignment_.size() != domain_.size()) {
    throw DimensionError("coarse-graining must assign every domain symbol");
  }
  std::vector<bool> hit(codomain_.size(), false);
  for (std::size_t t : assignment_) {
    if (t >= codomain_.size()) throw ValidationError("coarse-graining maps outside its codomain");
    hit[t] = true;
  }
  for (std::size_t t = 0; t < hit.size(); ++t) {
    if (!hit[t]) {
      throw ValidationError("coarse symbol '" + codomain_.label(t) + "' has no preimage");
    }
  }
}

// ---------------------------------------------------------------- operations

Channel compose(const Channel& lhs, const Channel& rhs) {
  if (!(lhs.input() == rhs.output())) {
    throw DimensionError("compose: left input alphabet differs from right output alphabet");
  }
  Matrix m = multiply(lhs.matrix(), rhs.matrix());
  if (!is_column_stochastic(m)) throw ValidationError("compose: product lost stochasticity");
  return Channel(rhs.input(), lhs.output(), std::move(m));
}

Channel deterministic_channel(const CoarseGraining& f) {
  Matrix m(f.codomain().size(), f.domain().size());
  for (std::size_t s = 0; s < f.domain().size(); ++s) m(f(s), s) = 1.0;
  return Channel(f.domain(), f.codomain(), std::move(m));
}

namespace {

// Normalizes the columns of a |X| x |C| table of joint masses P(x, c).
Channel conditional_channel(const Matrix& joint_xc, const Alphabet& cond, const Alphabet& out) {
  Matrix m(joint_xc.rows(), joint_xc.cols());
  for (std::size_t c = 0; c < joint_xc.cols(); ++c) {
    double total = 0.0;
    for (std::size_t x = 0; x < joint_xc.rows(); ++x) total += joint_xc(x, c);
    if (total <= 0.0) {
      throw UndefinedColumnError("conditioning symbol '" + cond.label(c) +
                                 "' has zero probability");
    }
    for (std::size_t x = 0; x < joint_xc.rows(); ++x) m(x, c) = joint_xc(x, c) / total;
  }
  return Channel(cond, out, std::move(m));
}

}  // namespace

Channel channel_from_joint(const JointDistribution& j, Output which) {
  const Matrix pair = j.pair_marginal(which);
  Matrix xs(pair.cols(), pair.rows());
  for (std::size_t s = 0; s < pair.rows(); ++s)
    for (std::size_t x = 0; x < pair.cols(); ++x) xs(x, s) = pair(s, x);
  return conditional_channel(xs, j.s(), j.output(which));
}

Channel channel_from_joint(const JointDistribution& j, Output which, const CoarseGraining& f) {
  if (!(f.domain() == j.s())) throw DimensionError("coarse-graining domain is not the S alphabet");
  const Matrix pair = j.pair_marginal(which);
  Matrix xt(pair.cols(), f.codomain().size());
  for (std::size_t s = 0; s < pair.rows(); ++s)
    for (std::size_t x = 0; x < pair.cols(); ++x) xt(x, f(s)) += pair(s, x);
  return conditional_channel(xt, f.codomain(), j.output(which));
}

ProbVector push_prior(const Channel& kappa, const ProbVector& prior) {
  if (!(kappa.input() == prior.alphabet())) {
    throw DimensionError("push_prior: prior alphabet differs from channel input");
  }
  std::vector<double> out(kappa.output().size(), 0.0);
  for (std::size_t s = 0; s < prior.size(); ++s)
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += kappa(x, s) * prior[s];
  return ProbVector(kappa.output(), std::move(out));
}

JointDistribution joint_from_channels(const ProbVector& prior, const Channel& k1, const Channel& k2) {
  if (!(k1.input() == prior.alphabet()) || !(k2.input() == prior.alphabet())) {
    throw DimensionError("joint_from_channels: channel inputs differ from the prior alphabet");
  }
  const std::size_t n1 = k1.output().size(), n2 = k2.output().size();
  std::vector<double> m(prior.size() * n1 * n2);
  for (std::size_t s = 0; s < prior.size(); ++s)
    for (std::size_t a = 0; a < n1; ++a)
      for (std::size_t b = 0; b < n2; ++b) m[(s * n1 + a) * n2 + b] = prior[s] * k1(a, s) * k2(b, s);
  return JointDistribution(prior.alphabet(), k1.output(), k2.output(), std::move(m));
}

JointDistribution restrict_to_support(const JointDistribution& j) {
  const ProbVector ps = j.marginal_s();
  std::vector<std::string> labels;
  std::vector<double> m;
  for (std::size_t s = 0; s < ps.size(); ++s) {
    if (ps[s] <= 0.0) continue;
    labels.push_back(j.s().label(s));
    for (std::size_t a = 0; a < j.x1().size(); ++a)
      for (std::size_t b = 0; b < j.x2().size(); ++b) m.push_back(j(s, a, b));
  }
  return JointDistribution(Alphabet(std::move(labels)), j.x1(), j.x2(), std::move(m));
}

JointDistribution with_coarse_third(const JointDistribution& j, Output which,
                                    const CoarseGraining& f) {
  if (!(f.domain() == j.s())) throw DimensionError("coarse-graining domain is not the S alphabet");
  const Matrix pair = j.pair_marginal(which);
  const std::size_t nx = pair.cols(), nt = f.codomain().size();
  std::vector<double> m(j.s().size() * nx * nt, 0.0);
  for (std::size_t s = 0; s < j.s().size(); ++s)
    for (std::size_t x = 0; x < nx; ++x) m[(s * nx + x) * nt + f(s)] = pair(s, x);
  return JointDistribution(j.s(), j.output(which), f.codomain(), std::move(m));
}

double entropy(std::span<const double> p) { return plogp_sum(p); }

double entropy(const ProbVector& p) { return plogp_sum(p.mass()); }

double mutual_information(const ProbVector& prior, const Channel& kappa) {
  const ProbVector out = push_prior(kappa, prior);
  double conditional = 0.0;
  for (std::size_t s = 0; s < prior.size(); ++s) {
    if (prior[s] > 0.0) conditional += prior[s] * plogp_sum(kappa.matrix().column(s));
  }
  return std::max(0.0, entropy(out) - conditional);
}

double conditional_mutual_information(const JointDistribution& j) {
  // I(S;X1|X2) = sum q log [ q(s,a,b) q(b) / (q(s,b) q(a,b)) ]
  const std::size_t ns = j.s().size(), na = j.x1().size(), nb = j.x2().size();
  std::vector<double> qb(nb, 0.0), qsb(ns * nb, 0.0), qab(na * nb, 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b) {
        const double q = j(s, a, b);
        qb[b] += q;
        qsb[s * nb + b] += q;
        qab[a * nb + b] += q;
      }
  double cmi = 0.0;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t b = 0; b < nb; ++b) {
        const double q = j(s, a, b);
        if (q <= 0.0) continue;
        // Separate ratios: the four-way product can underflow for tiny masses.
        cmi += q * (std::log2(q / qab[a * nb + b]) - std::log2(qsb[s * nb + b] / qb[b]));
      }
  return std::max(0.0, cmi);
}

}  // namespace chanorder
