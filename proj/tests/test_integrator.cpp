#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cprdyn/errors.hpp"
#include "cprdyn/integrator.hpp"
#include "oracles.hpp"

using namespace cprdyn;
using doctest::Approx;

namespace {

double dist(SystemState a, SystemState b) { return std::hypot(a.R - b.R, a.x - b.x); }

IntegratorConfig fast(double t_max = 200.0) {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = t_max;
  return cfg;
}

}  // namespace

TEST_CASE("fixed point start gives a constant trajectory") {
  const ModelParams p;
  const Trajectory traj = integrate(UpdateRule::Replicator, p, {0.3, 1.0}, fast());
  CHECK(traj.terminal == Terminal::Converged);
  REQUIRE(traj.states.size() >= 2);
  for (const SystemState& s : traj.states) {
    CHECK(s.R == Approx(0.3).epsilon(1e-12));
    CHECK(s.x == 1.0);
  }
}

TEST_CASE("replicator run from (0.8, 0.9) reaches the sustainable point") {
  const ModelParams p;
  const oracle::Params q;
  // Reference: plain RK4 at dt/100 without clamping or early stop.
  const oracle::Vec2 ref = oracle::rk4(oracle::replicator(q), {0.8, 0.9}, 1e-5, 1'500'000);
  const oracle::Vec2 ref_late = oracle::rk4(oracle::replicator(q), ref, 1e-3, 185'000);
  CHECK(std::abs(ref_late[0] - 0.3) < 1e-6);
  CHECK(std::abs(ref_late[1] - 1.0) < 1e-6);

  const Endpoint end = integrate_to_equilibrium(UpdateRule::Replicator, p, {0.8, 0.9}, fast());
  CHECK(end.terminal == Terminal::Converged);
  CHECK(dist(end.state, {ref_late[0], ref_late[1]}) < 1e-4);
  CHECK(dist(end.state, {0.3, 1.0}) < 1e-4);

  // Transient agreement at t = 15 as well.
  IntegratorConfig cfg = fast(15.0);
  cfg.eps_converge = 1e-300;
  const Trajectory traj = integrate(UpdateRule::Replicator, p, {0.8, 0.9}, cfg);
  CHECK(traj.times.back() == Approx(15.0));
  CHECK(dist(traj.states.back(), {ref[0], ref[1]}) < 1e-9);
}

TEST_CASE("replicator run from (0.05, 0.1) depletes") {
  const ModelParams p;
  const oracle::Vec2 ref = oracle::rk4(oracle::replicator({}), {0.05, 0.1}, 1e-4, 200'000);
  CHECK(ref[0] < 1e-6);
  const Endpoint end = integrate_to_equilibrium(UpdateRule::Replicator, p, {0.05, 0.1}, fast());
  CHECK(end.state.R < 1e-6);
  CHECK(end.state.R == 0.0);  // absorbed
  CHECK(end.terminal == Terminal::Converged);
  CHECK(end.state.x == Approx(ref[1]).epsilon(1e-6));
}

TEST_CASE("depleted start stays put") {
  const ModelParams p;
  for (UpdateRule rule : {UpdateRule::Replicator, UpdateRule::Moran, UpdateRule::Fermi}) {
    const Endpoint end = integrate_to_equilibrium(rule, p, {0.0, 0.4}, fast());
    CHECK(end.state == SystemState{0.0, 0.4});
    CHECK(end.terminal == Terminal::Converged);
    CHECK(end.steps == 2);
  }
}

TEST_CASE("linear rule converges to its interior point") {
  const ModelParams p;
  const Endpoint end = integrate_to_equilibrium(UpdateRule::Linear, p, {0.9, 0.5}, fast());
  CHECK(end.terminal == Terminal::Converged);
  CHECK(std::abs(end.state.R - 0.3 / 2.3) < 1e-4);
  CHECK(std::abs(end.state.x - 2.0 / 2.3) < 1e-4);
}

TEST_CASE("logistic rule with k = 0.1 collapses to (0, 1 - sigma(-k c))") {
  ModelParams p;
  p.k = 0.1;
  // Oracle: with R = 0 the x equation is linear, x* = 1 - sigma(-0.05).
  const double x_star = 1.0 - oracle::sigmoid(-0.05);
  CHECK(x_star == Approx(0.5124973964842103).epsilon(1e-14));
  const oracle::Vec2 ref = oracle::rk4(oracle::logistic({.k = 0.1}), {0.9, 0.5}, 1e-3, 200'000);
  CHECK(ref[0] < 1e-12);
  CHECK(ref[1] == Approx(x_star).epsilon(1e-9));

  const Endpoint end = integrate_to_equilibrium(UpdateRule::Logistic, p, {0.9, 0.5}, fast());
  CHECK(end.terminal == Terminal::Converged);
  CHECK(end.state.R < 1e-6);
  CHECK(std::abs(end.state.x - 0.5125) < 0.01);
  CHECK(end.state.x == Approx(x_star).epsilon(1e-8));
}

TEST_CASE("logistic rule with k = 10 settles on the interior fixed point") {
  const ModelParams p;  // k = 10
  const oracle::Vec2 fp = oracle::logistic_interior({}, 0.78, 1.0);
  CHECK(fp[0] == Approx(0.22319911845756812).epsilon(1e-10));
  CHECK(fp[1] == Approx(0.9409223988135139).epsilon(1e-10));
  const Endpoint end = integrate_to_equilibrium(UpdateRule::Logistic, p, {0.9, 0.5}, fast());
  CHECK(end.terminal == Terminal::Converged);
  CHECK(dist(end.state, {fp[0], fp[1]}) < 1e-6);
}

TEST_CASE("RK4 error shrinks sixteenfold per halving") {
  const ModelParams p;
  IntegratorConfig cfg;
  cfg.t_max = 5.0;
  cfg.eps_converge = 1e-300;
  const double base = 0.05;
  cfg.dt = base / 100.0;
  const SystemState ref = integrate(UpdateRule::Replicator, p, {0.8, 0.9}, cfg).states.back();

  std::vector<double> errors;
  for (double dt = base; errors.size() < 4; dt /= 2.0) {
    cfg.dt = dt;
    const Trajectory traj = integrate(UpdateRule::Replicator, p, {0.8, 0.9}, cfg);
    CHECK(traj.times.back() == Approx(5.0).epsilon(1e-12));
    errors.push_back(dist(traj.states.back(), ref));
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double ratio = errors[i] / errors[i + 1];
    INFO("halving " << i << " ratio " << ratio);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("box invariance and absorption over random starts") {
  const ModelParams p;
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 60.0;
  cfg.sample_every = 7;
  for (UpdateRule rule : kAllRules) {
    for (int trial = 0; trial < 20; ++trial) {
      const SystemState s0{u(gen), u(gen)};
      const Trajectory traj = integrate(rule, p, s0, cfg);
      REQUIRE(traj.times.size() == traj.states.size());
      CHECK(traj.times.front() == 0.0);
      CHECK(traj.states.front() == s0);
      bool absorbed = false;
      for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const SystemState s = traj.states[i];
        CHECK(in_unit_box(s));
        CHECK(std::isfinite(s.R));
        CHECK(std::isfinite(s.x));
        if (i > 0) CHECK(traj.times[i] > traj.times[i - 1]);
        if (absorbed) CHECK(s.R == 0.0);
        absorbed = absorbed || s.R == 0.0;
      }
    }
  }
}

TEST_CASE("a start below the extinction threshold is absorbed immediately") {
  const ModelParams p;
  const Trajectory traj = integrate(UpdateRule::Linear, p, {1e-12, 0.2}, fast(5.0));
  for (const SystemState& s : traj.states) CHECK(s.R == 0.0);
}

TEST_CASE("integration is deterministic") {
  const ModelParams p;
  for (UpdateRule rule : kAllRules) {
    const Trajectory a = integrate(rule, p, {0.62, 0.41}, fast(30.0));
    const Trajectory b = integrate(rule, p, {0.62, 0.41}, fast(30.0));
    CHECK(a.times == b.times);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i] == b.states[i]);
  }
}

TEST_CASE("sampling keeps every n-th step plus the last") {
  const ModelParams p;
  IntegratorConfig cfg = fast(1.0);
  cfg.dt = 0.01;
  cfg.sample_every = 30;
  cfg.eps_converge = 1e-300;
  const Trajectory traj = integrate(UpdateRule::Linear, p, {0.5, 0.5}, cfg);
  // steps 0, 30, 60, 90 and the final step 100
  REQUIRE(traj.times.size() == 5);
  CHECK(traj.times[1] == Approx(0.3));
  CHECK(traj.times.back() == Approx(1.0));
  CHECK(traj.terminal == Terminal::HorizonReached);
}

TEST_CASE("unit-step rule stays bounded across the discontinuity") {
  const ModelParams p;
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const SystemState s0{u(gen), u(gen)};
    const Endpoint end = integrate_to_equilibrium(UpdateRule::UnitStep, p, s0, fast(100.0));
    CHECK(in_unit_box(end.state));
    CHECK(std::isfinite(end.state.R));
    CHECK(end.terminal == Terminal::Converged);
    CHECK(dist(end.state, {0.3, 1.0}) < 1e-6);
  }
  // Start exactly on the threshold.
  const Endpoint edge = integrate_to_equilibrium(UpdateRule::UnitStep, p, {0.5, 0.5}, fast(100.0));
  CHECK(dist(edge.state, {0.3, 1.0}) < 1e-6);
}

TEST_CASE("unit-step sliding on R = c is reported as a chattering average") {
  // With 1 - ec_hat = 0.7 above c = 0.5 the flow pins R at the threshold and
  // x at the point where the resource nullcline crosses it.
  ModelParams p;
  p.ec_hat = 0.3;
  const double x_slide = (1.0 - p.c - p.ed_hat) / (p.ec_hat - p.ed_hat);
  const Endpoint end = integrate_to_equilibrium(UpdateRule::UnitStep, p, {0.9, 0.5}, fast());
  CHECK(end.terminal == Terminal::HorizonReached);
  CHECK(end.chattering_average);
  CHECK(end.chattering_settled);
  CHECK(std::abs(end.state.R - p.c) < 1e-4);
  CHECK(std::abs(end.state.x - x_slide) < 1e-3);

  // Other rules never average.
  IntegratorConfig short_run = fast(0.5);
  const Endpoint plain = integrate_to_equilibrium(UpdateRule::Linear, p, {0.9, 0.5}, short_run);
  CHECK(plain.terminal == Terminal::HorizonReached);
  CHECK_FALSE(plain.chattering_average);
}

TEST_CASE("invalid inputs") {
  const ModelParams p;
  IntegratorConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(integrate(UpdateRule::Linear, p, {0.5, 0.5}, cfg), ValidationError);
  cfg = {};
  cfg.t_max = cfg.dt / 2;
  CHECK_THROWS_AS(integrate(UpdateRule::Linear, p, {0.5, 0.5}, cfg), ValidationError);
  cfg = {};
  cfg.sample_every = 0;
  CHECK_THROWS_AS(integrate(UpdateRule::Linear, p, {0.5, 0.5}, cfg), ValidationError);
  CHECK_THROWS_AS(integrate(UpdateRule::Linear, p, {1.5, 0.5}, fast()), ValidationError);
  ModelParams bad;
  bad.ed_hat = 0.5;
  CHECK_THROWS_AS(integrate(UpdateRule::Linear, bad, {0.5, 0.5}, fast()), ValidationError);
}

TEST_CASE("an absurd step size surfaces as a numerical error") {
  const ModelParams p;
  IntegratorConfig cfg;
  cfg.dt = 1e200;
  cfg.t_max = 1e201;
  CHECK_THROWS_AS(integrate(UpdateRule::Replicator, p, {0.8, 0.9}, cfg), NumericalError);
}
