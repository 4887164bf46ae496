#pragma once

#include <cstdint>
#include <vector>

#include "cprdyn/model.hpp"

namespace cprdyn {

struct IntegratorConfig {
  double dt = 1e-3;
  double t_max = 1000.0;
  double eps_converge = 1e-9;  // derivative-norm threshold
  double eps_extinct = 1e-9;   // R below this is set to 0 for good
  int sample_every = 1;        // keep every n-th step in a Trajectory
  // A unit-step run that reaches the horizon is reported as the time average of
  // its last 10%; the average counts as settled when the means of the two
  // halves of that window agree to chatter_tol (max norm).
  double chatter_tol = 1e-3;
};

void validate(const IntegratorConfig& cfg);

enum class Terminal { Converged, HorizonReached };

struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> states;
  Terminal terminal = Terminal::HorizonReached;
};

struct Endpoint {
  SystemState state;
  Terminal terminal = Terminal::HorizonReached;
  std::int64_t steps = 0;
  bool chattering_average = false;  // state is the final-window time average
  bool chattering_settled = false;  // ... and both half-window means agree
};

// One classic RK4 step followed by clamping to the unit box.  Does not apply
// extinction absorption.
SystemState rk4_step(UpdateRule rule, const ModelParams& p, SystemState s, double dt);

// Fixed-step RK4 with clamping, absorption at R < eps_extinct, and early stop
// once |f(s)| < eps_converge on two consecutive steps.  The first and last
// states are always kept.  Throws NumericalError on a non-finite state.
Trajectory integrate(UpdateRule rule, const ModelParams& p, SystemState s0,
                     const IntegratorConfig& cfg);

// Same dynamics as integrate() without storing the path.
Endpoint integrate_to_equilibrium(UpdateRule rule, const ModelParams& p, SystemState s0,
                                  const IntegratorConfig& cfg);

}  // namespace cprdyn
