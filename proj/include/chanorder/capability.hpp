#pragma once

// The more-capable preorder (mutual information compared over all input
// distributions), channel capacity, and the numerical check that a Markov
// approximation through a coarse-graining never carries more information.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "chanorder/core.hpp"

namespace chanorder {

// Seeded source of Dirichlet(1, ..., 1) samples. Built on mt19937_64, whose
// output sequence is fixed by the standard, with hand-written transforms so
// that samples do not depend on the standard library's distributions.
class DirichletSampler {
 public:
  explicit DirichletSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform01();  // in [0, 1)
  std::vector<double> sample(std::size_t dim);
  ProbVector sample(const Alphabet& alphabet);

 private:
  std::mt19937_64 engine_;
};

// Every composition of `resolution` into `dim` parts, scaled by 1/resolution,
// in lexicographic order of the parts.
std::vector<std::vector<double>> simplex_grid(std::size_t dim, std::size_t resolution);

enum class CapabilityStatus { refuted, unrefuted };

// `unrefuted` records that no tested prior violated the order; it is not a
// proof that k2 is more capable than k1.
struct CapabilityVerdict {
  CapabilityStatus status = CapabilityStatus::unrefuted;
  std::optional<ProbVector> counterexample;
  double info_first = 0.0;   // I(S;X1) at the counterexample
  double info_second = 0.0;  // I(S;X2) at the counterexample
  double margin = 0.0;
  std::size_t priors_tested = 0;
};

inline constexpr std::size_t kDefaultGridResolution = 50;
inline constexpr std::size_t kDefaultSampleCount = 2000;
inline constexpr double kCapabilityMargin = 1e-9;

// Looks for a prior with I(S;X2) < I(S;X1) - margin, i.e. evidence that k2 is
// not more capable than k1. Tests the simplex grid first, then the samples;
// reports the largest violation, earliest on ties.
CapabilityVerdict more_capable_refute(const Channel& k1, const Channel& k2,
                                      std::size_t grid_resolution = kDefaultGridResolution,
                                      std::size_t sample_count = kDefaultSampleCount,
                                      std::uint64_t seed = 0,
                                      double margin = kCapabilityMargin);

struct CapacityResult {
  double capacity = 0.0;  // I(optimal_prior; kappa), a lower bound
  ProbVector optimal_prior;
  double gap_bound = 0.0;  // true capacity lies in [capacity, capacity + gap_bound]
  std::size_t iterations = 0;
};

inline constexpr double kDefaultCapacityTolerance = 1e-9;

// Blahut-Arimoto from the uniform prior.
CapacityResult capacity(const Channel& kappa, double tolerance_bits = kDefaultCapacityTolerance);

struct LessCapableReport {
  std::size_t trials = 0;
  // Largest |I(S;X') - I(f(S);X')|, |I(f(S);X') - I(f(S);X)| and
  // positive part of I(f(S);X) - I(S;X) seen.
  double max_violation = 0.0;
  // Quantities at the trial with the largest violation.
  double info_s_approx = 0.0;     // I(S;X')
  double info_fs_approx = 0.0;    // I(f(S);X')
  double info_fs_direct = 0.0;    // I(f(S);X)
  double info_s_direct = 0.0;     // I(S;X)
};

// For each random prior pi on S, forms the joint pi(s) P(x|s) (keeping the
// channel X <- S of `j`), rebuilds the Markov approximation from it, and
// checks I(S;X') = I(f(S);X') = I(f(S);X) <= I(S;X).
LessCapableReport verify_less_capable_lemma(const JointDistribution& j, Output which,
                                            const CoarseGraining& f, std::size_t trials,
                                            std::uint64_t seed);

}  // namespace chanorder
