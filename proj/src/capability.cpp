#include "chanorder/capability.hpp"

#include <algorithm>
#include <cmath>

#include "chanorder/blackwell.hpp"

namespace chanorder {

double DirichletSampler::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<double> DirichletSampler::sample(std::size_t dim) {
  std::vector<double> w(dim);
  double total = 0.0;
  for (double& v : w) {
    v = -std::log1p(-uniform01());  // Exp(1); Gamma(1) marginals
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

ProbVector DirichletSampler::sample(const Alphabet& alphabet) {
  return ProbVector::normalized(alphabet, sample(alphabet.size()));
}

std::vector<std::vector<double>> simplex_grid(std::size_t dim, std::size_t resolution) {
  std::vector<std::vector<double>> points;
  if (dim == 0 || resolution == 0) return points;
  std::vector<std::size_t> parts(dim, 0);
  // Recursive enumeration flattened: fill parts[0..dim-2], last takes the rest.
  auto emit = [&] {
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      p[i] = static_cast<double>(parts[i]) / static_cast<double>(resolution);
    }
    points.push_back(std::move(p));
  };
  if (dim == 1) {
    parts[0] = resolution;
    emit();
    return points;
  }
  std::size_t used = 0;
  while (true) {
    parts[dim - 1] = resolution - used;
    emit();
    // Advance the odometer over parts[0..dim-2] with sum <= resolution.
    std::size_t k = dim - 1;
    while (k > 0) {
      --k;
      if (used < resolution) {
        ++parts[k];
        ++used;
        break;
      }
      used -= parts[k];
      parts[k] = 0;
      if (k == 0) return points;
    }
  }
}

CapabilityVerdict more_capable_refute(const Channel& k1, const Channel& k2,
                                      std::size_t grid_resolution, std::size_t sample_count,
                                      std::uint64_t seed, double margin) {
  if (!(k1.input() == k2.input())) throw DimensionError("channels have different input alphabets");
  const Alphabet& in = k1.input();

  CapabilityVerdict verdict;
  verdict.margin = margin;
  double worst = margin;

  auto consider = [&](const ProbVector& prior) {
    ++verdict.priors_tested;
    const double i1 = mutual_information(prior, k1);
    const double i2 = mutual_information(prior, k2);
    if (i1 - i2 > worst) {
      worst = i1 - i2;
      verdict.status = CapabilityStatus::refuted;
      verdict.counterexample = prior;
      verdict.info_first = i1;
      verdict.info_second = i2;
    }
  };

  for (auto& point : simplex_grid(in.size(), grid_resolution)) {
    consider(ProbVector::normalized(in, std::move(point)));
  }
  DirichletSampler sampler(seed);
  for (std::size_t i = 0; i < sample_count; ++i) consider(sampler.sample(in));
  return verdict;
}

CapacityResult capacity(const Channel& kappa, double tolerance_bits) {
  if (!(tolerance_bits > 0.0)) throw ValidationError("capacity tolerance must be positive");
  const std::size_t ns = kappa.input().size(), nx = kappa.output().size();
  std::vector<double> p(ns, 1.0 / static_cast<double>(ns));
  std::vector<double> q(nx), d(ns);
  constexpr std::size_t kMaxIterations = 1000000;

  double lower = 0.0, upper = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t x = 0; x < nx; ++x) q[x] += kappa(x, s) * p[s];
    // d(s) = D(kappa(.|s) || q); I(p) = sum p d, capacity <= max d.
    lower = 0.0;
    upper = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      double kl = 0.0;
      for (std::size_t x = 0; x < nx; ++x) {
        const double k = kappa(x, s);
        if (k > 0.0) kl += k * std::log2(k / q[x]);
      }
      d[s] = std::max(0.0, kl);
      lower += p[s] * d[s];
      upper = std::max(upper, d[s]);
    }
    if (upper - lower <= tolerance_bits || iter + 1 >= kMaxIterations) break;
    double z = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      p[s] *= std::exp2(d[s]);
      z += p[s];
    }
    for (double& v : p) v /= z;
  }

  ProbVector prior(kappa.input(), p);
  const double info = mutual_information(prior, kappa);
  return CapacityResult{info, std::move(prior), std::max(0.0, upper - info), iter + 1};
}

namespace {

// I(T;X) from a table of joint masses P(t, x).
double pair_information(const Matrix& joint) {
  std::vector<double> pt(joint.rows(), 0.0), px(joint.cols(), 0.0);
  for (std::size_t t = 0; t < joint.rows(); ++t)
    for (std::size_t x = 0; x < joint.cols(); ++x) {
      pt[t] += joint(t, x);
      px[x] += joint(t, x);
    }
  return std::max(0.0, entropy(pt) + entropy(px) - entropy(joint.data()));
}

}  // namespace

LessCapableReport verify_less_capable_lemma(const JointDistribution& j, Output which,
                                            const CoarseGraining& f, std::size_t trials,
                                            std::uint64_t seed) {
  const Channel direct = channel_from_joint(j, which);
  const Alphabet trivial({"*"});
  const Channel silent = Channel::constant(j.s(), ProbVector::point_mass(trivial, 0));

  LessCapableReport report;
  report.trials = trials;
  DirichletSampler sampler(seed);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const ProbVector prior = sampler.sample(j.s());
    const JointDistribution jp = joint_from_channels(prior, direct, silent);

    const Channel x_given_fs = channel_from_joint(jp, Output::x1, f);
    const Channel approx = compose(x_given_fs, deterministic_channel(f));
    const ProbVector prior_fs = push_prior(deterministic_channel(f), prior);

    Matrix joint_fs_x(f.codomain().size(), direct.output().size());
    for (std::size_t s = 0; s < prior.size(); ++s)
      for (std::size_t x = 0; x < direct.output().size(); ++x)
        joint_fs_x(f(s), x) += prior[s] * direct(x, s);

    const double i_s_approx = mutual_information(prior, approx);
    const double i_fs_approx = mutual_information(prior_fs, x_given_fs);
    const double i_fs_direct = pair_information(joint_fs_x);
    const double i_s_direct = mutual_information(prior, direct);

    const double violation = std::max({std::abs(i_s_approx - i_fs_approx),
                                       std::abs(i_fs_approx - i_fs_direct),
                                       std::max(0.0, i_fs_direct - i_s_direct)});
    if (trial == 0 || violation > report.max_violation) {
      report.max_violation = violation;
      report.info_s_approx = i_s_approx;
      report.info_fs_approx = i_fs_approx;
      report.info_fs_direct = i_fs_direct;
      report.info_s_direct = i_s_direct;
    }
  }
  return report;
}

}  // namespace chanorder
