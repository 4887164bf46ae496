#include "cprdyn/stochastic.hpp"

#include <algorithm>
#include <cmath>

#include "cprdyn/errors.hpp"
#include "cprdyn/parallel.hpp"

namespace cprdyn {

namespace {

struct Sample {
  double x;
  double R;
};

void mean_and_std(const std::vector<std::vector<Sample>>& runs, std::size_t k, double Sample::*field,
                  double& mean, double& sd) {
  const double n = static_cast<double>(runs.size());
  double sum = 0.0;
  for (const auto& run : runs) sum += run[k].*field;
  mean = sum / n;
  double ss = 0.0;
  for (const auto& run : runs) {
    const double d = run[k].*field - mean;
    ss += d * d;
  }
  sd = std::sqrt(ss / (n - 1.0));
}

}  // namespace

Rng replica_rng(std::uint64_t seed, std::uint64_t replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32),
                    0x63707264u};
  return Rng(seq);
}

MicroState initial_micro_state(SystemState s0, const ModelParams& p) {
  if (!in_unit_box(s0)) throw ValidationError("initial state must lie in [0,1]^2");
  MicroState m;
  m.n_c = std::clamp(static_cast<int>(std::floor(s0.x * p.N + 0.5)), 0, p.N);
  m.R = s0.R;
  return m;
}

TransitionRates transition_rates(UpdateRule rule, int n_c, double R, const ModelParams& p) {
  return transition_rates(rule, SystemState{R, static_cast<double>(n_c) / p.N}, p);
}

MicroState step_micro(const MicroState& state, UpdateRule rule, const ModelParams& p, Rng& rng) {
  MicroState next = state;
  const TransitionRates rates = transition_rates(rule, state.n_c, state.R, p);
  const double u = uniform01(rng);
  if (u < rates.t_plus) {
    ++next.n_c;
  } else if (u < rates.t_plus + rates.t_minus) {
    --next.n_c;
  }
  const double dt = 1.0 / p.N;
  const double dR = resource_derivative({state.R, next.x(p)}, p);
  next.R = std::clamp(state.R + dt * dR, 0.0, 1.0);
  ++next.tau;
  return next;
}

void validate(const EnsembleConfig& cfg) {
  if (cfg.replicas < 2) throw ValidationError("ensemble needs at least 2 replicas");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
    throw ValidationError("t_end must be positive");
  }
  if (!(cfg.sample_dt > 0.0) || !std::isfinite(cfg.sample_dt)) {
    throw ValidationError("sample_dt must be positive");
  }
}

EnsembleStats run_ensemble(UpdateRule rule, const ModelParams& p, SystemState s0,
                           const EnsembleConfig& cfg) {
  validate(p);
  validate(cfg);
  const MicroState start = initial_micro_state(s0, p);

  const std::int64_t tau_end = std::max<std::int64_t>(1, std::llround(cfg.t_end * p.N));
  const std::int64_t every = std::max<std::int64_t>(1, std::llround(cfg.sample_dt * p.N));
  std::vector<std::int64_t> sample_taus;
  for (std::int64_t tau = 0; tau <= tau_end; tau += every) sample_taus.push_back(tau);
  if (sample_taus.back() != tau_end) sample_taus.push_back(tau_end);

  std::vector<std::vector<Sample>> runs(static_cast<std::size_t>(cfg.replicas));
  parallel_for(runs.size(), cfg.threads, [&](std::size_t r) {
    Rng rng = replica_rng(cfg.seed, r);
    MicroState m = start;
    std::vector<Sample>& out = runs[r];
    out.reserve(sample_taus.size());
    for (std::int64_t target : sample_taus) {
      while (m.tau < target) m = step_micro(m, rule, p, rng);
      out.push_back({m.x(p), m.R});
    }
  });

  EnsembleStats stats;
  stats.replicas = cfg.replicas;
  stats.seed = cfg.seed;
  const std::size_t n = sample_taus.size();
  stats.sample_times.resize(n);
  stats.mean_x.resize(n);
  stats.std_x.resize(n);
  stats.mean_R.resize(n);
  stats.std_R.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    stats.sample_times[k] = static_cast<double>(sample_taus[k]) / p.N;
    mean_and_std(runs, k, &Sample::x, stats.mean_x[k], stats.std_x[k]);
    mean_and_std(runs, k, &Sample::R, stats.mean_R[k], stats.std_R[k]);
  }
  return stats;
}

DriftEstimate estimate_one_step_drift(UpdateRule rule, const ModelParams& p,
                                      const MicroState& state, std::int64_t trials,
                                      std::uint64_t seed) {
  validate(p);
  if (trials < 2) throw ValidationError("drift estimate needs at least 2 trials");
  Rng rng = replica_rng(seed, 0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t i = 0; i < trials; ++i) {
    const MicroState next = step_micro(state, rule, p, rng);
    const double jump = static_cast<double>(next.n_c - state.n_c);  // N * dx
    sum += jump;
    sum_sq += jump * jump;
  }
  const double n = static_cast<double>(trials);
  DriftEstimate est;
  est.trials = trials;
  est.drift = sum / n;
  const double var = std::max(0.0, (sum_sq - n * est.drift * est.drift) / (n - 1.0));
  est.standard_error = std::sqrt(var / n);
  return est;
}

}  // namespace cprdyn
