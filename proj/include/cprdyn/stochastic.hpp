#pragma once

// Finite-population realization of the master equation: one update attempt per
// micro step, with the resource advanced by an explicit Euler step of length
// 1/N so that N micro steps make one unit of model time.

#include <cstdint>
#include <random>
#include <vector>

#include "cprdyn/model.hpp"

namespace cprdyn {

using Rng = std::mt19937_64;

// Uniform on [0,1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Independent stream for replica `replica` of a run seeded with `seed`.
Rng replica_rng(std::uint64_t seed, std::uint64_t replica);

struct MicroState {
  int n_c = 0;            // cooperators, 0..N
  double R = 0.0;
  std::int64_t tau = 0;   // micro steps taken; t = tau / N

  double x(const ModelParams& p) const { return static_cast<double>(n_c) / p.N; }
  double t(const ModelParams& p) const { return static_cast<double>(tau) / p.N; }
};

// round(x0 N), halves rounded toward more cooperators.
MicroState initial_micro_state(SystemState s0, const ModelParams& p);

TransitionRates transition_rates(UpdateRule rule, int n_c, double R, const ModelParams& p);

MicroState step_micro(const MicroState& state, UpdateRule rule, const ModelParams& p, Rng& rng);

struct EnsembleConfig {
  int replicas = 100;
  double t_end = 10.0;
  std::uint64_t seed = 1;
  double sample_dt = 0.1;  // rounded to a whole number of micro steps
  unsigned threads = 0;    // 0 = hardware concurrency
};

void validate(const EnsembleConfig& cfg);

struct EnsembleStats {
  std::vector<double> sample_times;
  std::vector<double> mean_x;
  std::vector<double> std_x;  // sample standard deviation across replicas
  std::vector<double> mean_R;
  std::vector<double> std_R;
  int replicas = 0;
  std::uint64_t seed = 0;
};

EnsembleStats run_ensemble(UpdateRule rule, const ModelParams& p, SystemState s0,
                           const EnsembleConfig& cfg);

struct DriftEstimate {
  double drift = 0.0;           // mean of N * (x' - x) over trials
  double standard_error = 0.0;  // of that mean
  std::int64_t trials = 0;
};

// Monte Carlo estimate of the one-step drift from a fixed micro state; its
// expectation is T+ - T- at that state.
DriftEstimate estimate_one_step_drift(UpdateRule rule, const ModelParams& p,
                                      const MicroState& state, std::int64_t trials,
                                      std::uint64_t seed);

}  // namespace cprdyn
