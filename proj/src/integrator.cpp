#include "cprdyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cprdyn/errors.hpp"

namespace cprdyn {

namespace {

double norm(Derivative d) { return std::sqrt(d.dR * d.dR + d.dx * d.dx); }

std::int64_t step_count(const IntegratorConfig& cfg) {
  return static_cast<std::int64_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
}

// Drives the stepping loop and calls on_step(i, t_i, s_i) for i = 0..last.
template <class OnStep>
Terminal drive(UpdateRule rule, const ModelParams& p, SystemState s0,
               const IntegratorConfig& cfg, OnStep&& on_step) {
  validate(p);
  validate(cfg);
  if (!in_unit_box(s0)) {
    std::ostringstream msg;
    msg << "initial state (" << s0.R << ", " << s0.x << ") is outside [0,1]^2";
    throw ValidationError(msg.str());
  }

  const std::int64_t n_steps = step_count(cfg);
  SystemState s = s0;
  bool extinct = s.R < cfg.eps_extinct;
  if (extinct) s.R = 0.0;
  on_step(std::int64_t{0}, 0.0, s);

  int quiet_steps = 0;
  for (std::int64_t i = 1; i <= n_steps; ++i) {
    s = rk4_step(rule, p, s, cfg.dt);
    if (!std::isfinite(s.R) || !std::isfinite(s.x)) {
      std::ostringstream msg;
      msg << "non-finite state at t=" << static_cast<double>(i) * cfg.dt
          << "; reduce dt (currently " << cfg.dt << ")";
      throw NumericalError(msg.str());
    }
    if (extinct || s.R < cfg.eps_extinct) {
      extinct = true;
      s.R = 0.0;
    }
    const bool last_call = i == n_steps;
    quiet_steps = norm(coupled_derivative(rule, s, p)) < cfg.eps_converge ? quiet_steps + 1 : 0;
    const bool converged = quiet_steps >= 2;
    on_step(i, static_cast<double>(i) * cfg.dt, s, converged || last_call);
    if (converged) return Terminal::Converged;
  }
  return Terminal::HorizonReached;
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ValidationError("dt must be positive");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) {
    throw ValidationError("t_max must be positive");
  }
  if (!(cfg.dt < cfg.t_max)) throw ValidationError("dt must be smaller than t_max");
  if (!(cfg.eps_converge > 0.0)) throw ValidationError("eps_converge must be positive");
  if (!(cfg.eps_extinct > 0.0)) throw ValidationError("eps_extinct must be positive");
  if (cfg.sample_every < 1) throw ValidationError("sample_every must be >= 1");
  if (!(cfg.chatter_tol > 0.0)) throw ValidationError("chatter_tol must be positive");
}

SystemState rk4_step(UpdateRule rule, const ModelParams& p, SystemState s, double dt) {
  const auto shifted = [&](Derivative d, double h) {
    return SystemState{s.R + h * d.dR, s.x + h * d.dx};
  };
  const Derivative k1 = coupled_derivative(rule, s, p);
  const Derivative k2 = coupled_derivative(rule, shifted(k1, 0.5 * dt), p);
  const Derivative k3 = coupled_derivative(rule, shifted(k2, 0.5 * dt), p);
  const Derivative k4 = coupled_derivative(rule, shifted(k3, dt), p);
  const double sixth = dt / 6.0;
  SystemState next{s.R + sixth * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR),
                   s.x + sixth * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx)};
  if (!std::isfinite(next.R) || !std::isfinite(next.x)) return next;
  return clamp_to_box(next);
}

Trajectory integrate(UpdateRule rule, const ModelParams& p, SystemState s0,
                     const IntegratorConfig& cfg) {
  Trajectory traj;
  const auto keep = [&](std::int64_t i, double t, SystemState s, bool final_step = false) {
    if (i % cfg.sample_every == 0 || final_step) {
      traj.times.push_back(t);
      traj.states.push_back(s);
    }
  };
  traj.terminal = drive(rule, p, s0, cfg, keep);
  return traj;
}

Endpoint integrate_to_equilibrium(UpdateRule rule, const ModelParams& p, SystemState s0,
                                  const IntegratorConfig& cfg) {
  const bool track_window = rule == UpdateRule::UnitStep;
  const std::int64_t n_steps = step_count(cfg);
  const std::int64_t window_start = n_steps - n_steps / 10;
  const std::int64_t window_mid = window_start + (n_steps - window_start) / 2;

  // Running sums over the two halves of the final 10% window.
  struct Half {
    double R = 0.0;
    double x = 0.0;
    std::int64_t n = 0;
    SystemState mean() const {
      return {R / static_cast<double>(n), x / static_cast<double>(n)};
    }
  };
  Half first;
  Half second;

  Endpoint end;
  const auto track = [&](std::int64_t i, double, SystemState s, bool = false) {
    end.state = s;
    end.steps = i;
    if (track_window && i >= window_start) {
      Half& half = i < window_mid ? first : second;
      half.R += s.R;
      half.x += s.x;
      ++half.n;
    }
  };
  end.terminal = drive(rule, p, s0, cfg, track);

  if (end.terminal == Terminal::HorizonReached && track_window && first.n > 0 && second.n > 0) {
    const double total = static_cast<double>(first.n + second.n);
    const SystemState avg{(first.R + second.R) / total, (first.x + second.x) / total};
    const SystemState a = first.mean();
    const SystemState b = second.mean();
    end.state = clamp_to_box(avg);
    end.chattering_average = true;
    end.chattering_settled = std::max(std::abs(a.R - b.R), std::abs(a.x - b.x)) <= cfg.chatter_tol;
  }
  return end;
}

}  // namespace cprdyn
