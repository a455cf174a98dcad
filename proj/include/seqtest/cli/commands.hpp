#pragma once

// The command implementations behind the seqtest executable. Each command
// turns a validated ExperimentConfig into one main table, plus optional side
// tables that are written next to --out.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "seqtest/cli/config.hpp"
#include "seqtest/cli/table.hpp"
#include "seqtest/commuting_lp.hpp"
#include "seqtest/divergences.hpp"
#include "seqtest/montecarlo.hpp"
#include "seqtest/qubit_measurements.hpp"
#include "seqtest/schur_block.hpp"
#include "seqtest/sdp_bound.hpp"
#include "seqtest/sprt.hpp"
#include "seqtest/states.hpp"

namespace seqtest::cli {

inline constexpr const char* kVersion = "0.1.0";

struct CommandOutput {
  Table main;
  // (suffix, table): written to <out>.<suffix>.<format> when --out is set.
  std::vector<std::pair<std::string, Table>> side;
};

namespace detail {

inline std::string num(double v) { return format_number(v); }

inline std::string pair_text(const QubitPair& p) { return num(p.r0) + "," + num(p.r1) + "," + num(p.theta); }

inline const QubitPair& require_pair(const ExperimentConfig& cfg, const std::string& command) {
  if (!cfg.pair) throw ValidationError(command + " needs --pair r0,r1,theta");
  return *cfg.pair;
}

inline void common_meta(Table& t, const std::string& command, const ExperimentConfig& cfg) {
  t.set_meta("command", command);
  t.set_meta("version", std::string(kVersion));
  t.set_meta("units", cfg.unit_name());
  t.set_meta("log_base", cfg.log_base);
  t.set_meta("format", cfg.format);
}

inline void spec_meta(Table& t, const ErrorSpec& spec, double prior) {
  t.set_meta("mode", to_string(spec.mode));
  if (spec.mode == ErrorMode::kWeakAsymmetric) {
    t.set_meta("alpha", *spec.alpha);
    t.set_meta("beta", *spec.beta);
  } else {
    t.set_meta("eps0", spec.eps0);
    t.set_meta("eps1", spec.eps1);
  }
  t.set_meta("prior", prior);
}

// The single error level used by symmetric single-eps quantities.
inline double single_eps(const ErrorSpec& spec) {
  if (spec.mode == ErrorMode::kWeakAsymmetric) return std::min(*spec.alpha, *spec.beta);
  return std::min(spec.eps0, spec.eps1);
}

}  // namespace detail

/// D in both directions, sandwiched Renyi grid, Chernoff exponent and kappa_n.
inline CommandOutput cmd_divergence(const ExperimentConfig& cfg) {
  const QubitPair& pair = detail::require_pair(cfg, "divergence");
  const ErrorSpec spec = cfg.error_spec();
  const double eps = spec.eps0;
  const int n_max = cfg.n_max.value_or(10);
  const double u = cfg.units();
  const auto [rho, sigma] = make_qubit_pair(pair);

  Table t({"quantity", "s", "n", "value", "note"});
  detail::common_meta(t, "divergence", cfg);
  t.set_meta("pair", detail::pair_text(pair));
  t.set_meta("eps", eps);
  t.set_meta("n_max", static_cast<std::int64_t>(n_max));

  auto marker = [](const ExtendedReal& v) { return v.is_infinite() ? std::string("infinite") : std::string(); };
  const ExtendedReal d01 = quantum_relative_entropy(rho, sigma);
  const ExtendedReal d10 = quantum_relative_entropy(sigma, rho);
  t.add_row({std::string("relative_entropy_rho_sigma"), {}, {}, d01.value() * u, marker(d01)});
  t.add_row({std::string("relative_entropy_sigma_rho"), {}, {}, d10.value() * u, marker(d10)});
  for (double s : {1.01, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    const ExtendedReal v = sandwiched_renyi(rho, sigma, s);
    t.add_row({std::string("sandwiched_renyi_rho_sigma"), s, {}, v.value() * u, marker(v)});
  }
  const ExtendedReal xi = chernoff_exponent(rho, sigma);
  t.add_row({std::string("chernoff_exponent"), {}, {}, xi.value() * u, marker(xi)});

  if (d01.is_infinite() || d01.value() <= 0.0) {
    t.add_warning("kappa_n undefined: D(rho||sigma) is " + std::string(d01.is_infinite() ? "infinite" : "zero"));
  } else {
    const double n_star = -std::log(eps) / d01.value();
    t.set_meta("kappa_n_star", n_star);
    for (int n = 1; n <= n_max; ++n) {
      if (static_cast<double>(n) >= n_star) {
        t.add_warning("kappa_n rows stop at n < n* = " + detail::num(n_star));
        break;
      }
      const KappaResult k = strong_converse_kappa_detail(rho, sigma, n, eps);
      t.add_row({std::string("kappa"), k.s_opt, static_cast<std::int64_t>(n), k.kappa, std::string()});
    }
  }
  return {std::move(t), {}};
}

/// Local SPRT mean copies against the Chernoff copy count: a phi sweep for
/// one pair, or an equal-purity (r, theta) grid at the unbiased angle.
inline CommandOutput cmd_local(const ExperimentConfig& cfg) {
  const ErrorSpec spec = cfg.error_spec();
  const double eps = detail::single_eps(spec);
  const std::string sweep = cfg.sweep.empty() ? (cfg.pair ? "phi" : "grid") : cfg.sweep;

  if (sweep == "phi") {
    const QubitPair& pair = detail::require_pair(cfg, "local");
    Table t({"phi", "mean_N_local", "N_Ch", "ratio", "note"});
    detail::common_meta(t, "local", cfg);
    t.set_meta("sweep", sweep);
    t.set_meta("pair", detail::pair_text(pair));
    t.set_meta("eps", eps);
    t.set_meta("phi_grid", static_cast<std::int64_t>(cfg.phi_grid));
    double n_ch = kInf;
    std::string ch_note;
    try {
      n_ch = chernoff_copies(pair, eps);
    } catch (const DomainError&) {
      ch_note = "degenerate";
    }
    auto row = [&](double phi, const std::string& tag) {
      std::string note = tag;
      double mean = kInf;
      try {
        mean = local_bayes_mean(pair, ProjectiveAngle{phi}, eps);
      } catch (const DomainError&) {
        note = note.empty() ? "no_drift" : note + ";no_drift";
      }
      if (!ch_note.empty()) note = note.empty() ? ch_note : note + ";" + ch_note;
      t.add_row({phi, mean, n_ch, n_ch / mean, note});
    };
    for (int k = 0; k < cfg.phi_grid; ++k) row(std::numbers::pi * k / (cfg.phi_grid - 1), "");
    row(pair.theta / 2.0, "singular");
    row(std::numbers::pi - pair.theta / 2.0, "singular");
    try {
      const AngleOptimum opt = optimize_angle(pair, eps);
      row(opt.angle.phi, "optimum");
    } catch (const DomainError&) {
      t.add_warning("no measurement angle distinguishes the states");
    }
    return {std::move(t), {}};
  }
  if (sweep != "grid") throw ValidationError("local: sweep must be phi or grid");

  const Grid rg = cfg.r_grid.value_or(Grid{0.1, 0.95, 18});
  const Grid tg = cfg.theta_grid.value_or(Grid{std::numbers::pi / 10.0, std::numbers::pi, 19});
  Table t({"r", "theta", "mean_N_local", "N_Ch", "ratio", "note"});
  detail::common_meta(t, "local", cfg);
  t.set_meta("sweep", sweep);
  t.set_meta("r_grid", rg.str());
  t.set_meta("theta_grid", tg.str());
  t.set_meta("eps", eps);
  t.set_meta("phi", std::string("pi/2"));
  for (double r : rg.values()) {
    for (double theta : tg.values()) {
      try {
        const double mean = unbiased_local_mean(r, theta, eps);
        const double n_ch = chernoff_copies(QubitPair{r, r, theta}, eps);
        t.add_row({r, theta, mean, n_ch, n_ch / mean, std::string()});
      } catch (const DomainError&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        t.add_row({r, theta, nan, nan, nan, std::string("degenerate")});
      }
    }
  }
  return {std::move(t), {}};
}

/// Monte-Carlo local SPRT under both hypotheses, optionally over an eps sweep.
inline CommandOutput cmd_simulate(const ExperimentConfig& cfg) {
  const QubitPair& pair = detail::require_pair(cfg, "simulate");
  const ProjectiveAngle angle{cfg.phi.value_or(std::numbers::pi / 2.0)};
  angle.validate();
  const long trials = cfg.trials.value_or(3000);

  std::vector<ErrorSpec> specs;
  if (cfg.eps_sweep) {
    for (double e : *cfg.eps_sweep) {
      const ErrorMode m = parse_error_mode(cfg.mode);
      specs.push_back(m == ErrorMode::kStrong      ? ErrorSpec::strong(e, e)
                      : m == ErrorMode::kSymmetric ? ErrorSpec::symmetric(e)
                                                   : ErrorSpec::weak(e, e));
    }
  } else {
    specs.push_back(cfg.error_spec());
  }

  Table t({"eps0", "eps1", "truth", "trials", "mean_n", "wald_mean", "asymptotic_mean", "q25", "q50", "q75",
           "empirical_error", "predicted_error", "mean_overshoot", "max_overshoot", "tail_fraction", "saturated"});
  Table hist({"eps0", "eps1", "truth", "n", "count"});
  Table traj({"eps0", "eps1", "truth", "step", "mean", "median", "q25", "q75", "mean_low", "mean_high"});
  for (Table* x : {&t, &hist, &traj}) {
    detail::common_meta(*x, "simulate", cfg);
    x->set_meta("pair", detail::pair_text(pair));
    x->set_meta("phi", angle.phi);
    x->set_meta("mode", cfg.mode);
    x->set_meta("prior", cfg.prior);
    x->set_meta("trials", static_cast<std::int64_t>(trials));
    x->set_meta("seed", static_cast<std::int64_t>(cfg.seed));
    x->set_meta("seed_rule", std::string("hypothesis h uses seed + h"));
    x->set_meta("rng", std::string(kRngAlgorithm));
  }

  MonteCarloOptions opt;
  opt.max_steps = cfg.max_steps;
  std::vector<double> xs;
  std::vector<std::vector<double>> ys(2);
  for (const ErrorSpec& spec : specs) {
    const MeanSampleSizes wald = [&] {
      const auto [p, q] = outcome_distributions(pair, angle);
      return mean_copies_classical(p, q, spec, cfg.prior);
    }();
    const MeanSampleSizes asym = [&] {
      const auto [p, q] = outcome_distributions(pair, angle);
      return asymptotic_mean_copies(p, q, spec, cfg.prior);
    }();
    xs.push_back(-std::log(spec.mode == ErrorMode::kWeakAsymmetric ? *spec.beta : spec.eps0));
    for (int truth = 0; truth < 2; ++truth) {
      const QubitSprtResult r =
          run_qubit_sprt(pair, angle, spec, cfg.prior, truth, trials, RngSpec{cfg.seed + truth, kRngAlgorithm}, opt);
      const BatchStats& s = r.stats;
      const auto [alpha, beta] = errors_from_thresholds(r.thresholds);
      ys[truth].push_back(s.mean_n);
      t.add_row({spec.eps0, spec.eps1, static_cast<std::int64_t>(truth), static_cast<std::int64_t>(s.trials), s.mean_n,
                 truth == 0 ? wald.n0 : wald.n1, truth == 0 ? asym.n0 : asym.n1, s.q25, s.q50, s.q75,
                 truth == 0 ? s.empirical_alpha : s.empirical_beta, truth == 0 ? alpha : beta, s.mean_overshoot,
                 s.max_overshoot, s.tail_fraction, static_cast<std::int64_t>(s.saturated)});
      for (const auto& [n, c] : s.histogram) {
        hist.add_row({spec.eps0, spec.eps1, static_cast<std::int64_t>(truth), static_cast<std::int64_t>(n),
                      static_cast<std::int64_t>(c)});
      }
      const std::size_t steps = r.bands.steps();
      const std::size_t stride = std::max<std::size_t>(1, (steps + 399) / 400);
      for (std::size_t k = 0; k < steps; k += stride) {
        traj.add_row({spec.eps0, spec.eps1, static_cast<std::int64_t>(truth), static_cast<std::int64_t>(k + 1),
                      r.bands.mean[k], r.bands.median[k], r.bands.q25[k], r.bands.q75[k], r.bands.mean_low[k],
                      r.bands.mean_high[k]});
      }
    }
  }
  if (xs.size() >= 2) {
    const auto [p, q] = outcome_distributions(pair, angle);
    const double inv[2] = {1.0 / classical_kl(p, q).value(), 1.0 / classical_kl(q, p).value()};
    for (int truth = 0; truth < 2; ++truth) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[truth][i];
      }
      mx /= static_cast<double>(xs.size());
      my /= static_cast<double>(xs.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[truth][i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      const std::string h = std::to_string(truth);
      t.set_meta("slope_h" + h, sxy / sxx);
      t.set_meta("inverse_kl_h" + h, inv[truth]);
    }
  }
  return {std::move(t), {{"histogram", std::move(hist)}, {"trajectory", std::move(traj)}}};
}

/// Block-length sweep of the measured rates with sandwich bounds and limits.
inline CommandOutput cmd_blocks(const ExperimentConfig& cfg) {
  const QubitPair& pair = detail::require_pair(cfg, "blocks");
  const IntRange range = cfg.ell_range.value_or(IntRange{1, 32, 1});
  const double u = cfg.units();
  const auto [rho, sigma] = make_qubit_pair(pair);
  const double d01 = quantum_relative_entropy(rho, sigma).value();
  const double d10 = quantum_relative_entropy(sigma, rho).value();
  const double lim_sr = asymptotic_rate_sigma_rho(pair);
  const double lim_rs = asymptotic_rate_rho_sigma(pair);

  Table t({"ell", "rate_pq", "rate_qp", "D_rho_sigma", "D_sigma_rho", "sandwich_gap", "sandwich_bound",
           "sandwich_ok", "limit_rate_qp", "limit_rate_pq"});
  detail::common_meta(t, "blocks", cfg);
  t.set_meta("pair", detail::pair_text(pair));
  t.set_meta("ell_range", range.str());
  for (int ell : range.values()) {
    const MeasuredRates m = measured_rates(pair, ell);
    const double gap = d01 - m.rate_pq;
    const double bound = std::log(ell + 1.0) / ell;
    const bool ok = std::isfinite(d01) ? (gap >= -1e-9 && gap <= bound + 1e-9) : std::isinf(m.rate_pq);
    t.add_row({static_cast<std::int64_t>(ell), m.rate_pq * u, m.rate_qp * u, d01 * u, d10 * u, gap * u, bound * u,
               std::string(ok ? "true" : "false"), lim_sr * u, lim_rs * u});
  }
  return {std::move(t), {}};
}

namespace detail {

// Spectra of two commuting qubit states in their common eigenbasis.
inline std::pair<OutcomeDistribution, OutcomeDistribution> commuting_spectra(const QubitPair& pair) {
  const auto [rho, sigma] = make_qubit_pair(pair);
  const ComplexMatrix comm = rho.matrix() * sigma.matrix() - sigma.matrix() * rho.matrix();
  if (comm.cwiseAbs().maxCoeff() > 1e-12) throw ValidationError("the lp method needs commuting states");
  const DensityMatrix& basis_state = pair.r1 > 0.0 ? sigma : rho;
  const Spectrum s = eigendecompose(basis_state);
  const ComplexMatrix pr = s.eigenvectors.adjoint() * rho.matrix() * s.eigenvectors;
  const ComplexMatrix ps = s.eigenvectors.adjoint() * sigma.matrix() * s.eigenvectors;
  std::vector<double> p, q;
  for (Eigen::Index i = 0; i < pr.rows(); ++i) {
    p.push_back(std::max(pr(i, i).real(), 0.0));
    q.push_back(std::max(ps(i, i).real(), 0.0));
  }
  auto normalise = [](std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    for (double& x : v) x /= sum;
  };
  normalise(p);
  normalise(q);
  return {OutcomeDistribution(p), OutcomeDistribution(q)};
}

}  // namespace detail

/// Lower bound T~^n on the continue probability for n = 1..n_max.
inline CommandOutput cmd_sdp_curve(const ExperimentConfig& cfg) {
  const QubitPair& pair = detail::require_pair(cfg, "sdp-curve");
  const ErrorSpec spec = cfg.error_spec();
  const Hypothesis hyp = hypothesis_from_int(cfg.hypothesis);
  const auto [rho, sigma] = make_qubit_pair(pair);
  const double n_star = critical_copy_number(rho, sigma, spec, cfg.prior, hyp);
  const int last = static_cast<int>(std::floor(n_star));
  const int n_max = cfg.n_max.value_or(std::min(max_sdp_copies(), static_cast<int>(std::ceil(1.5 * n_star)) + 1));

  Table t({"n", "T", "n_star", "bound_sum", "duality_gap", "iterations", "note"});
  detail::common_meta(t, "sdp-curve", cfg);
  t.set_meta("pair", detail::pair_text(pair));
  detail::spec_meta(t, spec, cfg.prior);
  t.set_meta("hypothesis", static_cast<std::int64_t>(cfg.hypothesis));
  t.set_meta("method", cfg.method);
  t.set_meta("n_max", static_cast<std::int64_t>(n_max));
  t.set_meta("n_star", n_star);
  if (n_max < last) {
    const std::string w = "n_max = " + std::to_string(n_max) + " is below n* = " + detail::num(n_star) +
                          "; bound_sum is truncated";
    t.add_warning(w);
    t.add_row({{}, {}, n_star, {}, {}, {}, "warning: " + w});
  }
  double sum = 1.0;
  if (cfg.method == "lp") {
    const auto [p, q] = detail::commuting_spectra(pair);
    for (int n = 1; n <= n_max; ++n) {
      const double v = lp_oracle_commuting(p, q, n, spec, cfg.prior, hyp);
      if (n <= last) sum += v;
      t.add_row({static_cast<std::int64_t>(n), v, n_star, sum, 0.0, std::int64_t{0}, std::string("exact_lp")});
    }
  } else {
    seqtest::detail::check_copies(n_max, max_sdp_copies());
    for (int n = 1; n <= n_max; ++n) {
      const ContinueBound b = continue_lower_bound_detail(pair, n, spec, cfg.prior, hyp);
      if (n <= last) sum += b.value;
      t.add_row({static_cast<std::int64_t>(n), b.value, n_star, sum, b.duality_gap,
                 static_cast<std::int64_t>(b.iterations), std::string()});
    }
  }
  t.set_meta("bound_sum", sum);
  return {std::move(t), {}};
}

/// Attainability of the worst-case bound over an (r0, r1) grid per theta.
inline CommandOutput cmd_region(const ExperimentConfig& cfg) {
  const std::vector<double> thetas =
      cfg.theta_list.value_or(std::vector<double>{0.0, std::numbers::pi / 100.0, std::numbers::pi / 10.0,
                                                  std::numbers::pi / 2.0});
  const Grid rg = cfg.r_grid.value_or(Grid{0.0, 1.0, 21});
  Table t({"theta", "r0", "r1", "region"});
  detail::common_meta(t, "region", cfg);
  t.set_meta("r_grid", rg.str());
  std::string list;
  for (double th : thetas) list += (list.empty() ? "" : ",") + detail::num(th);
  t.set_meta("theta_list", list);
  for (double theta : thetas) {
    for (double r0 : rg.values()) {
      for (double r1 : rg.values()) {
        QubitPair pair{r0, r1, theta};
        pair.validate();
        t.add_row({theta, r0, r1, to_string(attainability_region(pair))});
      }
    }
  }
  return {std::move(t), {}};
}

/// Unambiguous pure-state protocol: an overlap sweep at the symmetric
/// optimum, or a c0 scan along the tradeoff curve at fixed overlap.
inline CommandOutput cmd_pure(const ExperimentConfig& cfg) {
  const std::string sweep = cfg.sweep.empty() ? "s" : cfg.sweep;
  const bool simulate = cfg.trials.has_value();
  Table t({"s", "c0", "c1", "mean_n0", "mean_n1", "bayes", "worst_case", "simulated_n0", "simulated_n1"});
  detail::common_meta(t, "pure", cfg);
  t.set_meta("sweep", sweep);
  t.set_meta("prior", cfg.prior);
  if (simulate) {
    t.set_meta("trials", static_cast<std::int64_t>(*cfg.trials));
    t.set_meta("seed", static_cast<std::int64_t>(cfg.seed));
    t.set_meta("seed_rule", std::string("hypothesis h uses seed + h"));
    t.set_meta("rng", std::string(kRngAlgorithm));
  }
  MonteCarloOptions opt;
  opt.max_steps = cfg.max_steps;
  opt.saturation = SaturationPolicy::kFlag;
  auto add = [&](const UnambiguousSpec& u) {
    const MeanSampleSizes m = unambiguous_mean_copies(u, cfg.prior);
    Cell sim0, sim1;
    if (simulate) {
      sim0 = run_unambiguous_trials(u.s, u.c0, 0, *cfg.trials, RngSpec{cfg.seed, kRngAlgorithm}, opt).mean_n;
      sim1 = run_unambiguous_trials(u.s, u.c0, 1, *cfg.trials, RngSpec{cfg.seed + 1, kRngAlgorithm}, opt).mean_n;
    }
    t.add_row({u.s, u.c0, u.c1, m.n0, m.n1, m.bayes, m.worst_case, sim0, sim1});
  };

  if (sweep == "s") {
    const Grid sg = cfg.s_grid.value_or(Grid{0.0, 0.95, 20});
    if (sg.lo < 0.0 || sg.hi >= 1.0) throw ValidationError("s-grid must lie in [0, 1)");
    t.set_meta("s_grid", sg.str());
    for (double s : sg.values()) add(optimal_symmetric_unambiguous(s));
    return {std::move(t), {}};
  }
  if (sweep != "c0") throw ValidationError("pure: sweep must be s or c0");
  double s = 0.0;
  if (cfg.s) {
    s = *cfg.s;
  } else if (cfg.pair) {
    if (cfg.pair->r0 != 1.0 || cfg.pair->r1 != 1.0) throw ValidationError("pure: --pair must be pure (r0 = r1 = 1)");
    s = pure_overlap(cfg.pair->theta);
  } else {
    throw ValidationError("pure c0 sweep needs --s or a pure --pair");
  }
  if (!(s >= 0.0 && s < 1.0)) throw ValidationError("pure: overlap s must lie in [0, 1)");
  const int points = 101;
  t.set_meta("s", s);
  t.set_meta("c0_points", static_cast<std::int64_t>(points));
  double best = kInf, best_c0 = s;
  for (int k = 0; k < points; ++k) {
    const double c0 = s * s + (1.0 - s * s) * k / points;
    const UnambiguousSpec u = UnambiguousSpec::on_tradeoff(s, c0);
    add(u);
    const double w = unambiguous_mean_copies(u, cfg.prior).worst_case;
    if (w < best) {
      best = w;
      best_c0 = c0;
    }
  }
  t.set_meta("argmin_worst_case_c0", best_c0);
  return {std::move(t), {}};
}

namespace detail {

inline MeanSampleSizes means_from_rates(double num0, double num1, double rate0, double rate1, double prior) {
  auto one = [](double num, double rate, bool& order_one) {
    if (std::isinf(rate)) {
      order_one = true;
      return 1.0;
    }
    if (rate <= 0.0) return kInf;
    return std::max(1.0, num / rate);
  };
  MeanSampleSizes m;
  m.n0 = one(num0, rate0, m.n0_order_one);
  m.n1 = one(num1, rate1, m.n1_order_one);
  m.bayes = prior * m.n0 + (1.0 - prior) * m.n1;
  m.worst_case = std::max(m.n0, m.n1);
  m.leading_order = true;
  return m;
}

}  // namespace detail

/// Lower and upper bounds on the mean copies for one pair and error spec.
inline CommandOutput cmd_bounds(const ExperimentConfig& cfg) {
  const QubitPair& pair = detail::require_pair(cfg, "bounds");
  const ErrorSpec spec = cfg.error_spec();
  const auto [rho, sigma] = make_qubit_pair(pair);
  const Attainability region = attainability_region(pair);

  Table t({"quantity", "n0", "n1", "bayes", "worst_case", "n0_order_one", "n1_order_one", "attainability"});
  detail::common_meta(t, "bounds", cfg);
  t.set_meta("pair", detail::pair_text(pair));
  detail::spec_meta(t, spec, cfg.prior);
  const std::string region_name = to_string(region);
  auto add = [&](const std::string& name, const MeanSampleSizes& m) {
    t.add_row({name, m.n0, m.n1, m.bayes, m.worst_case, std::string(m.n0_order_one ? "true" : "false"),
               std::string(m.n1_order_one ? "true" : "false"), region_name});
    for (const auto& w : m.warnings) t.add_warning(name + ": " + w);
  };

  add("ultimate_lower", ultimate_lower_bound(rho, sigma, spec, cfg.prior));

  double num0 = 0.0, num1 = 0.0;
  if (spec.mode == ErrorMode::kWeakAsymmetric) {
    num0 = -(1.0 - *spec.alpha) * std::log(*spec.beta);
    num1 = -(1.0 - *spec.beta) * std::log(*spec.alpha);
  } else {
    num0 = -std::log(spec.eps0);
    num1 = -std::log(spec.eps1);
  }
  add("block_sigma_basis", detail::means_from_rates(num0, num1, asymptotic_rate_rho_sigma(pair),
                                                    asymptotic_rate_sigma_rho(pair), cfg.prior));
  add("block_rho_basis", detail::means_from_rates(num0, num1, asymptotic_rate_sigma_rho(pair.swapped()),
                                                  asymptotic_rate_rho_sigma(pair.swapped()), cfg.prior));

  const double eps = detail::single_eps(spec);
  if (eps < 0.05) {
    try {
      const AngleOptimum opt = optimize_angle(pair, eps);
      const auto [p, q] = outcome_distributions(pair, opt.angle);
      MeanSampleSizes m = asymptotic_mean_copies(p, q, spec, cfg.prior);
      t.set_meta("local_phi", opt.angle.phi);
      add("local_optimal_angle", m);
    } catch (const DomainError& e) {
      t.add_warning(std::string("local_optimal_angle: ") + e.what());
    }
    try {
      const double n_ch = chernoff_copies(pair, eps);
      MeanSampleSizes m;
      m.n0 = m.n1 = m.bayes = m.worst_case = n_ch;
      add("chernoff_fixed_size", m);
    } catch (const DomainError& e) {
      t.add_warning(std::string("chernoff_fixed_size: ") + e.what());
    }
  } else {
    t.add_warning("local and Chernoff rows need eps < 0.05");
  }
  return {std::move(t), {}};
}

inline CommandOutput run_command(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "divergence") return cmd_divergence(cfg);
  if (name == "local") return cmd_local(cfg);
  if (name == "simulate") return cmd_simulate(cfg);
  if (name == "blocks") return cmd_blocks(cfg);
  if (name == "sdp-curve") return cmd_sdp_curve(cfg);
  if (name == "region") return cmd_region(cfg);
  if (name == "pure") return cmd_pure(cfg);
  if (name == "bounds") return cmd_bounds(cfg);
  throw ValidationError("unknown command '" + name + "'");
}

}  // namespace seqtest::cli
