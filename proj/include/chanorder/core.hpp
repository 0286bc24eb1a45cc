#pragma once

// Finite probability primitives: alphabets, distributions, channels and the
// entropy / mutual-information functionals everything else is built on.
// All information quantities are in bits.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chanorder {

inline constexpr double kProbTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Alphabet or shape mismatch between objects that are combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Conditioning on a symbol of zero probability.
class UndefinedColumnError : public Error {
 public:
  using Error::Error;
};

// A value violates the invariants of its type (negative mass, bad sum, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> labels);

  // Labels "0", "1", ..., "n-1".
  static Alphabet range(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> find(std::string_view label) const;
  // Throws ValidationError naming the symbol when absent.
  std::size_t index(std::string_view label) const;

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> labels_;
};

// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::vector<double> column(std::size_t c) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& lhs, const Matrix& rhs);
double max_abs_difference(const Matrix& a, const Matrix& b);

class ProbVector {
 public:
  // Validates nonnegativity and unit sum within kProbTolerance.
  ProbVector(Alphabet alphabet, std::vector<double> mass);

  static ProbVector uniform(Alphabet alphabet);
  static ProbVector point_mass(Alphabet alphabet, std::size_t index);
  // Rescales nonnegative weights to unit sum. Throws on zero total.
  static ProbVector normalized(Alphabet alphabet, std::vector<double> weights);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  std::span<const double> mass() const { return mass_; }

  bool has_full_support() const;

  bool operator==(const ProbVector&) const = default;

 private:
  Alphabet alphabet_;
  std::vector<double> mass_;
};

// Column-stochastic matrix: entry (x, s) is P(x|s), rows indexed by output
// symbols and columns by input symbols.
class Channel {
 public:
  Channel(Alphabet input, Alphabet output, Matrix matrix);

  static Channel identity(const Alphabet& alphabet);
  // Every column equals `column`.
  static Channel constant(const Alphabet& input, const ProbVector& column);

  const Alphabet& input() const { return input_; }
  const Alphabet& output() const { return output_; }
  const Matrix& matrix() const { return matrix_; }
  double operator()(std::size_t x, std::size_t s) const { return matrix_(x, s); }

  bool operator==(const Channel&) const = default;

 private:
  Alphabet input_;
  Alphabet output_;
  Matrix matrix_;
};

enum class Output { x1, x2 };

// Joint mass function of (S, X1, X2), stored densely.
class JointDistribution {
 public:
  JointDistribution(Alphabet s, Alphabet x1, Alphabet x2, std::vector<double> mass);

  const Alphabet& s() const { return s_; }
  const Alphabet& x1() const { return x1_; }
  const Alphabet& x2() const { return x2_; }
  const Alphabet& output(Output which) const { return which == Output::x1 ? x1_ : x2_; }

  double operator()(std::size_t s, std::size_t x1, std::size_t x2) const {
    return mass_[(s * x1_.size() + x1) * x2_.size() + x2];
  }
  std::span<const double> mass() const { return mass_; }

  ProbVector marginal_s() const;
  ProbVector marginal(Output which) const;
  // P(s, x) as an |S| x |X| matrix.
  Matrix pair_marginal(Output which) const;

  // Same distribution with the roles of X1 and X2 exchanged.
  JointDistribution swapped() const;

  bool operator==(const JointDistribution&) const = default;

 private:
  Alphabet s_;
  Alphabet x1_;
  Alphabet x2_;
  std::vector<double> mass_;
};

// Deterministic map f from the S alphabet onto a coarser alphabet.
class CoarseGraining {
 public:
  CoarseGraining(Alphabet domain, Alphabet codomain, std::vector<std::size_t> assignment);

  const Alphabet& domain() const { return domain_; }
  const Alphabet& codomain() const { return codomain_; }
  std::size_t operator()(std::size_t s) const { return assignment_[s]; }
  std::span<const std::size_t> assignment() const { return assignment_; }

  bool operator==(const CoarseGraining&) const = default;

 private:
  Alphabet domain_;
  Alphabet codomain_;
  std::vector<std::size_t> assignment_;
};

// lhs . rhs; requires lhs.input() == rhs.output().
Channel compose(const Channel& lhs, const Channel& rhs);

// The channel f(S) <- S.
Channel deterministic_channel(const CoarseGraining& f);

// X <- S, columns P(x|s). Throws UndefinedColumnError for P(s) = 0.
Channel channel_from_joint(const JointDistribution& j, Output which);
// X <- f(S), masses pooled over the preimage of each coarse symbol.
Channel channel_from_joint(const JointDistribution& j, Output which, const CoarseGraining& f);

ProbVector push_prior(const Channel& kappa, const ProbVector& prior);

// Q(s, x1, x2) = prior(s) k1(x1|s) k2(x2|s).
JointDistribution joint_from_channels(const ProbVector& prior, const Channel& k1, const Channel& k2);

// Drops S symbols of zero probability.
JointDistribution restrict_to_support(const JointDistribution& j);

// Joint of (S, X_which, f(S)) for conditional-independence checks.
JointDistribution with_coarse_third(const JointDistribution& j, Output which,
                                    const CoarseGraining& f);

double entropy(std::span<const double> p);
double entropy(const ProbVector& p);
double mutual_information(const ProbVector& prior, const Channel& kappa);
// I(S; X1 | X2).
double conditional_mutual_information(const JointDistribution& j);

bool is_column_stochastic(const Matrix& m, double tol = kProbTolerance);

}  // namespace chanorder
