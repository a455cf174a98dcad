#pragma once

// Seeded simulation of the sequential protocols: the classical SPRT walk over
// outcome distributions, the local qubit SPRT with trajectory bands, the
// zero-error unambiguous protocol and the one-sided J^2 detector.
//
// Randomness: every trial owns an mt19937_64 stream seeded with
// splitmix64(seed ^ splitmix64(trial)), so results do not depend on the order
// in which trials are executed. Uniforms take the top 53 bits of each draw.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "seqtest/divergences.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/qubit_measurements.hpp"
#include "seqtest/sprt.hpp"
#include "seqtest/states.hpp"

namespace seqtest {

inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64(seed,trial)/53bit";
inline constexpr double kSaturationTolerance = 1e-3;
inline constexpr long kMinMaxSteps = 10000;

struct RngSpec {
  std::uint64_t seed = 0;
  std::string algorithm_id = kRngAlgorithm;

  void validate() const {
    if (algorithm_id != kRngAlgorithm) {
      throw ValidationError("unknown generator '" + algorithm_id + "' (only " + kRngAlgorithm + " is provided)");
    }
  }
};

class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial) : engine_(splitmix64(seed ^ splitmix64(trial))) {}

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

enum class Decision { kAcceptH0, kAcceptH1, kSaturated };

inline std::string to_string(Decision d) {
  switch (d) {
    case Decision::kAcceptH0: return "accept_H0";
    case Decision::kAcceptH1: return "accept_H1";
    case Decision::kSaturated: return "saturated";
  }
  return "?";
}

struct TrialResult {
  long stopping_time = 0;
  Decision decision = Decision::kSaturated;
  double final_z = 0.0;
  // Distance past the crossed threshold; 0 for infinite (conclusive) steps.
  double overshoot = 0.0;
};

// Saturated trials are either an error (the default) or only flagged, for
// protocols that are expected never to stop under one hypothesis.
enum class SaturationPolicy { kThrow, kFlag };

struct MonteCarloOptions {
  std::optional<long> max_steps;
  SaturationPolicy saturation = SaturationPolicy::kThrow;
  // Trials whose walks are recorded for the trajectory bands.
  int band_trials = 3000;
};

struct BatchStats {
  long trials = 0;
  long completed = 0;
  long saturated = 0;
  int truth = 0;
  long max_steps = 0;
  std::uint64_t seed = 0;
  // Over completed trials; NaN when none completed.
  double mean_n = std::numeric_limits<double>::quiet_NaN();
  double q25 = std::numeric_limits<double>::quiet_NaN();
  double q50 = std::numeric_limits<double>::quiet_NaN();
  double q75 = std::numeric_limits<double>::quiet_NaN();
  // Type I rate (accept H1 under H0) for truth 0, type II for truth 1; the
  // rate that does not apply is 0.
  long errors = 0;
  double empirical_alpha = 0.0;
  double empirical_beta = 0.0;
  double mean_overshoot = 0.0;
  double max_overshoot = 0.0;
  // Fraction of completed trials with N > 3 mean_n.
  double tail_fraction = 0.0;
  std::map<long, long> histogram;

  bool saturation_flag() const { return saturated > 0; }
};

/// Reduction of trial results into BatchStats; counts do not depend on the
/// order of add and merge, the overshoot sum only at rounding level.
class BatchAccumulator {
 public:
  BatchAccumulator(int truth, std::uint64_t seed, long max_steps) : truth_(truth), seed_(seed), max_steps_(max_steps) {}

  void add(const TrialResult& r) {
    ++trials_;
    if (r.decision == Decision::kSaturated) {
      ++saturated_;
      return;
    }
    ++histogram_[r.stopping_time];
    const bool wrong = (truth_ == 0) ? r.decision == Decision::kAcceptH1 : r.decision == Decision::kAcceptH0;
    if (wrong) ++errors_;
    overshoot_sum_ += r.overshoot;
    overshoot_max_ = std::max(overshoot_max_, r.overshoot);
  }

  void merge(const BatchAccumulator& other) {
    trials_ += other.trials_;
    saturated_ += other.saturated_;
    errors_ += other.errors_;
    overshoot_sum_ += other.overshoot_sum_;
    overshoot_max_ = std::max(overshoot_max_, other.overshoot_max_);
    for (const auto& [n, c] : other.histogram_) histogram_[n] += c;
  }

  BatchStats finish() const {
    BatchStats s;
    s.trials = trials_;
    s.saturated = saturated_;
    s.completed = trials_ - saturated_;
    s.truth = truth_;
    s.max_steps = max_steps_;
    s.seed = seed_;
    s.errors = errors_;
    s.histogram = histogram_;
    if (s.completed == 0) return s;
    const double done = static_cast<double>(s.completed);
    double sum = 0.0;
    for (const auto& [n, c] : histogram_) sum += static_cast<double>(n) * static_cast<double>(c);
    s.mean_n = sum / done;
    s.q25 = rank(0.25);
    s.q50 = rank(0.50);
    s.q75 = rank(0.75);
    const double rate = static_cast<double>(errors_) / done;
    (truth_ == 0 ? s.empirical_alpha : s.empirical_beta) = rate;
    s.mean_overshoot = overshoot_sum_ / done;
    s.max_overshoot = overshoot_max_;
    long tail = 0;
    for (const auto& [n, c] : histogram_) {
      if (static_cast<double>(n) > 3.0 * s.mean_n) tail += c;
    }
    s.tail_fraction = static_cast<double>(tail) / done;
    return s;
  }

 private:
  // Nearest-rank quantile: smallest n whose cumulative count reaches p of the total.
  double rank(double p) const {
    const long done = trials_ - saturated_;
    const long target = std::max<long>(1, static_cast<long>(std::ceil(p * static_cast<double>(done))));
    long cum = 0;
    for (const auto& [n, c] : histogram_) {
      cum += c;
      if (cum >= target) return static_cast<double>(n);
    }
    return static_cast<double>(histogram_.rbegin()->first);
  }

  int truth_;
  std::uint64_t seed_;
  long max_steps_;
  long trials_ = 0;
  long saturated_ = 0;
  long errors_ = 0;
  double overshoot_sum_ = 0.0;
  double overshoot_max_ = 0.0;
  std::map<long, long> histogram_;
};

namespace detail {

inline void check_truth(int truth) {
  if (truth != 0 && truth != 1) throw DomainError("truth must be 0 or 1");
}

inline void check_trials(long trials) {
  if (trials < 1) throw DomainError("trial count must be positive");
}

inline long default_max_steps(double predicted_mean) {
  if (!std::isfinite(predicted_mean)) return kMinMaxSteps;
  const double cap = std::max(static_cast<double>(kMinMaxSteps), std::ceil(50.0 * predicted_mean));
  if (cap > 1e12) throw ResourceError("predicted mean stopping time too large to simulate");
  return static_cast<long>(cap);
}

inline long resolve_max_steps(const MonteCarloOptions& opt, double predicted_mean) {
  if (!opt.max_steps) return default_max_steps(predicted_mean);
  const long m = *opt.max_steps;
  if (m < 1) throw DomainError("max_steps must be positive");
  if (std::isfinite(predicted_mean) && static_cast<double>(m) < 10.0 * predicted_mean) {
    std::ostringstream os;
    os << "max_steps = " << m << " is below 10x the predicted mean " << predicted_mean;
    throw DomainError(os.str());
  }
  return m;
}

inline void check_saturation(const BatchStats& s, SaturationPolicy policy) {
  if (policy == SaturationPolicy::kFlag) return;
  if (static_cast<double>(s.saturated) > kSaturationTolerance * static_cast<double>(s.trials)) {
    std::ostringstream os;
    os << s.saturated << " of " << s.trials << " trials reached max_steps = " << s.max_steps;
    throw SaturationError(os.str());
  }
}

// Inverse-CDF sampler; outcomes of probability zero are never returned.
class Categorical {
 public:
  explicit Categorical(const std::vector<double>& probs) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!(probs[i] > 0.0)) continue;
      acc += probs[i];
      outcome_.push_back(i);
      cdf_.push_back(acc);
    }
    if (cdf_.empty()) throw DomainError("outcome distribution has no positive entry");
    // Round-off must not leave a gap above the last positive outcome.
    cdf_.back() = 1.0;
  }

  std::size_t sample(TrialStream& rng) const {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < cdf_.size(); ++i) {
      if (u < cdf_[i]) return outcome_[i];
    }
    return outcome_.back();
  }

 private:
  std::vector<std::size_t> outcome_;
  std::vector<double> cdf_;
};

// Log-likelihood increments ln(q/p); +-1 marks a conclusive (infinite) step.
struct Increments {
  std::vector<double> z;
  std::vector<int> infinite;
};

inline Increments increments(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  Increments inc;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0 && q[x] > 0.0) {
      inc.z.push_back(kInf);
      inc.infinite.push_back(1);
    } else if (q[x] <= 0.0 && p[x] > 0.0) {
      inc.z.push_back(-kInf);
      inc.infinite.push_back(-1);
    } else if (p[x] <= 0.0) {
      inc.z.push_back(0.0);
      inc.infinite.push_back(0);
    } else {
      inc.z.push_back(std::log(q[x] / p[x]));
      inc.infinite.push_back(0);
    }
  }
  return inc;
}

inline TrialResult sprt_walk(const Categorical& sampler, const Increments& inc, const SprtThresholds& t,
                             long max_steps, TrialStream& rng, std::vector<double>* path) {
  double z = 0.0;
  for (long k = 1; k <= max_steps; ++k) {
    const std::size_t x = sampler.sample(rng);
    if (inc.infinite[x] != 0) {
      const bool h1 = inc.infinite[x] > 0;
      if (path != nullptr) path->push_back(h1 ? t.a : t.b);
      return {k, h1 ? Decision::kAcceptH1 : Decision::kAcceptH0, h1 ? kInf : -kInf, 0.0};
    }
    z += inc.z[x];
    if (path != nullptr) path->push_back(z);
    if (z >= t.a) return {k, Decision::kAcceptH1, z, z - t.a};
    if (z <= t.b) return {k, Decision::kAcceptH0, z, t.b - z};
  }
  return {max_steps, Decision::kSaturated, z, 0.0};
}

}  // namespace detail

/// Wald's no-overshoot prediction of the mean stopping time under `truth`;
/// infinite when the walk has no drift.
inline double predicted_mean_steps(const OutcomeDistribution& p, const OutcomeDistribution& q,
                                   const SprtThresholds& t, int truth) {
  detail::check_truth(truth);
  const auto [alpha, beta] = errors_from_thresholds(t);
  const auto [z0, z1] = wald_mean_positions(t, alpha, beta);
  const ExtendedReal d = truth == 0 ? classical_kl(p, q) : classical_kl(q, p);
  if (d.is_infinite()) return 1.0;
  if (d.value() <= 0.0) return kInf;
  return std::max(1.0, (truth == 0 ? -z0 : z1) / d.value());
}

/// Runs `trials` SPRT walks with outcomes drawn from p (truth 0) or q (truth 1).
inline BatchStats run_sprt_trials(const OutcomeDistribution& p, const OutcomeDistribution& q, const SprtThresholds& t,
                                  int truth, long trials, const RngSpec& rng, const MonteCarloOptions& opt = {}) {
  rng.validate();
  detail::check_truth(truth);
  detail::check_trials(trials);
  if (p.size() != q.size()) throw ShapeError("outcome distributions differ in length");
  const long max_steps = detail::resolve_max_steps(opt, predicted_mean_steps(p, q, t, truth));
  const detail::Categorical sampler(truth == 0 ? p.probs() : q.probs());
  const detail::Increments inc = detail::increments(p, q);
  BatchAccumulator acc(truth, rng.seed, max_steps);
  for (long i = 0; i < trials; ++i) {
    TrialStream stream(rng.seed, static_cast<std::uint64_t>(i));
    acc.add(detail::sprt_walk(sampler, inc, t, max_steps, stream, nullptr));
  }
  BatchStats s = acc.finish();
  detail::check_saturation(s, opt.saturation);
  return s;
}

/// Per-step summary of the recorded walks. A stopped walk keeps its final
/// value. Median-centred: quartiles q25/q75. Mean-centred: the quantiles
/// 25% of probability mass below and above the mean.
struct TrajectoryBands {
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> q25;
  std::vector<double> q75;
  std::vector<double> mean_low;
  std::vector<double> mean_high;

  std::size_t steps() const { return mean.size(); }
};

struct QubitSprtResult {
  BatchStats stats;
  TrajectoryBands bands;
  OutcomeDistribution p;
  OutcomeDistribution q;
  SprtThresholds thresholds;
  double predicted_mean = 0.0;
};

namespace detail {

// Linear-interpolation quantile of sorted values.
inline double sorted_quantile(const std::vector<double>& v, double p) {
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline TrajectoryBands bands_from_paths(const std::vector<std::vector<double>>& paths) {
  TrajectoryBands b;
  std::size_t steps = 0;
  for (const auto& path : paths) steps = std::max(steps, path.size());
  std::vector<double> col(paths.size());
  for (std::size_t k = 0; k < steps; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto& path = paths[i];
      col[i] = path.empty() ? 0.0 : path[std::min(k, path.size() - 1)];
      sum += col[i];
    }
    std::sort(col.begin(), col.end());
    const double mean = sum / static_cast<double>(col.size());
    const double below =
        static_cast<double>(std::upper_bound(col.begin(), col.end(), mean) - col.begin()) / static_cast<double>(col.size());
    b.mean.push_back(mean);
    b.median.push_back(sorted_quantile(col, 0.5));
    b.q25.push_back(sorted_quantile(col, 0.25));
    b.q75.push_back(sorted_quantile(col, 0.75));
    b.mean_low.push_back(sorted_quantile(col, below - 0.25));
    b.mean_high.push_back(sorted_quantile(col, below + 0.25));
  }
  return b;
}

}  // namespace detail

/// Local SPRT on a qubit pair measured at a fixed angle. The first
/// opt.band_trials walks are recorded for the trajectory bands.
inline QubitSprtResult run_qubit_sprt(const QubitPair& pair, const ProjectiveAngle& angle, const ErrorSpec& spec,
                                      double eta0, int truth, long trials, const RngSpec& rng,
                                      const MonteCarloOptions& opt = {}) {
  rng.validate();
  detail::check_truth(truth);
  detail::check_trials(trials);
  const auto [p, q] = outcome_distributions(pair, angle);
  const SprtThresholds t = thresholds_from_errors(spec, eta0);
  const double predicted = predicted_mean_steps(p, q, t, truth);
  const long max_steps = detail::resolve_max_steps(opt, predicted);
  const detail::Categorical sampler(truth == 0 ? p.probs() : q.probs());
  const detail::Increments inc = detail::increments(p, q);

  const long recorded = std::min<long>(trials, std::max(0, opt.band_trials));
  std::vector<std::vector<double>> paths(static_cast<std::size_t>(recorded));
  BatchAccumulator acc(truth, rng.seed, max_steps);
  for (long i = 0; i < trials; ++i) {
    TrialStream stream(rng.seed, static_cast<std::uint64_t>(i));
    std::vector<double>* path = i < recorded ? &paths[static_cast<std::size_t>(i)] : nullptr;
    acc.add(detail::sprt_walk(sampler, inc, t, max_steps, stream, path));
  }
  QubitSprtResult r{acc.finish(), {}, p, q, t, predicted};
  detail::check_saturation(r.stats, opt.saturation);
  if (recorded > 0) r.bands = detail::bands_from_paths(paths);
  return r;
}

/// Three-outcome POVM probabilities {conclusive 0, conclusive 1, inconclusive}
/// for pure states with overlap s and inconclusive rates (c0, c1). The states
/// are (cos t, +-sin t) with cos 2t = s.
inline std::pair<OutcomeDistribution, OutcomeDistribution> unambiguous_outcomes(const UnambiguousSpec& spec) {
  spec.validate();
  const double t = 0.5 * std::acos(std::clamp(spec.s, 0.0, 1.0));
  const Eigen::Vector2d psi0(std::cos(t), std::sin(t));
  const Eigen::Vector2d psi1(std::cos(t), -std::sin(t));
  const Eigen::Vector2d perp0(-psi0(1), psi0(0));
  const Eigen::Vector2d perp1(-psi1(1), psi1(0));
  const double g = 1.0 - spec.s * spec.s;
  if (g <= 0.0) throw DomainError("identical pure states admit no conclusive outcome");
  const Eigen::Matrix2d e0 = (1.0 - spec.c0) / g * perp1 * perp1.transpose();
  const Eigen::Matrix2d e1 = (1.0 - spec.c1) / g * perp0 * perp0.transpose();
  const Eigen::Matrix2d e_inc = Eigen::Matrix2d::Identity() - e0 - e1;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(e_inc, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-12) throw DomainError("inconclusive element is not positive: c0 c1 < s^2");
  auto probs = [&](const Eigen::Vector2d& psi) {
    const double a = psi.dot(e0 * psi);
    const double b = psi.dot(e1 * psi);
    return OutcomeDistribution{std::max(a, 0.0), std::max(b, 0.0), std::max(1.0 - a - b, 0.0)};
  };
  return {probs(psi0), probs(psi1)};
}

/// Repeats the unambiguous measurement until a conclusive outcome.
inline BatchStats run_unambiguous_trials(double s, double c0, int truth, long trials, const RngSpec& rng,
                                         const MonteCarloOptions& opt = {}) {
  rng.validate();
  detail::check_truth(truth);
  detail::check_trials(trials);
  const UnambiguousSpec spec = UnambiguousSpec::on_tradeoff(s, c0);
  const double c = truth == 0 ? spec.c0 : spec.c1;
  const double predicted = c >= 1.0 ? kInf : 1.0 / (1.0 - c);
  const long max_steps = detail::resolve_max_steps(opt, predicted);
  // Identical states (s = 1) never give a conclusive outcome.
  std::vector<double> probs{0.0, 0.0, 1.0};
  if (s < 1.0) {
    const auto [p0, p1] = unambiguous_outcomes(spec);
    probs = (truth == 0 ? p0 : p1).probs();
  }
  const detail::Categorical sampler(probs);
  BatchAccumulator acc(truth, rng.seed, max_steps);
  for (long i = 0; i < trials; ++i) {
    TrialStream stream(rng.seed, static_cast<std::uint64_t>(i));
    TrialResult r{max_steps, Decision::kSaturated, 0.0, 0.0};
    for (long k = 1; k <= max_steps; ++k) {
      const std::size_t x = sampler.sample(stream);
      if (x == 2) continue;
      r = {k, x == 0 ? Decision::kAcceptH0 : Decision::kAcceptH1, x == 0 ? -kInf : kInf, 0.0};
      break;
    }
    acc.add(r);
  }
  BatchStats st = acc.finish();
  detail::check_saturation(st, opt.saturation);
  return st;
}

/// One-sided detector for a pure rho: each step projects onto rho's direction
/// and stops (accepting H1) on the orthogonal outcome, which rho never yields.
/// Continue probability under truth nu: (1 + r_nu cos(angle to rho)) / 2.
inline BatchStats run_j2_detector(const QubitPair& pair, int truth, long trials, const RngSpec& rng,
                                  const MonteCarloOptions& opt = {}) {
  rng.validate();
  pair.validate();
  detail::check_truth(truth);
  detail::check_trials(trials);
  if (pair.r0 != 1.0) throw DomainError("the J^2 detector requires a pure rho (r0 = 1)");
  const double stay = truth == 0 ? 1.0 : 0.5 * (1.0 + pair.r1 * std::cos(pair.theta));
  const double predicted = stay >= 1.0 ? kInf : 1.0 / (1.0 - stay);
  const long max_steps = detail::resolve_max_steps(opt, predicted);
  const detail::Categorical sampler({stay, 1.0 - stay});
  BatchAccumulator acc(truth, rng.seed, max_steps);
  for (long i = 0; i < trials; ++i) {
    TrialStream stream(rng.seed, static_cast<std::uint64_t>(i));
    TrialResult r{max_steps, Decision::kSaturated, 0.0, 0.0};
    for (long k = 1; k <= max_steps; ++k) {
      if (sampler.sample(stream) == 0) continue;
      r = {k, Decision::kAcceptH1, kInf, 0.0};
      break;
    }
    acc.add(r);
  }
  BatchStats st = acc.finish();
  detail::check_saturation(st, opt.saturation);
  return st;
}

}  // namespace seqtest
