#include "cprdyn/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cprdyn/errors.hpp"

namespace cprdyn {

namespace {

void require_differentiable(UpdateRule rule, const ModelParams& p, SystemState s, double h) {
  if (rule == UpdateRule::UnitStep && std::abs(s.R - p.c) < h) {
    std::ostringstream msg;
    msg << "unit-step rule is discontinuous at R = c = " << p.c << "; no Jacobian at R = " << s.R;
    throw DomainError(msg.str());
  }
}

// R on the interior branch of the resource nullcline for a given x.
double resource_nullcline(const ModelParams& p, double x) {
  return 1.0 - x * p.ec_hat - (1.0 - x) * p.ed_hat;
}

}  // namespace

std::string_view kind_name(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::DepletedPoint:
      return "depleted_point";
    case EquilibriumKind::DepletedLine:
      return "depleted_line";
    case EquilibriumKind::SustainablePoint:
      return "sustainable_point";
    case EquilibriumKind::NumericalFixedPoint:
      return "numerical_fixed_point";
  }
  return "unknown";
}

std::string_view stability_name(Stability s) {
  switch (s) {
    case Stability::Stable:
      return "stable";
    case Stability::Unstable:
      return "unstable";
    case Stability::Saddle:
      return "saddle";
    case Stability::Neutral:
      return "neutral";
  }
  return "unknown";
}

StationarySet stationary_points(UpdateRule rule, const ModelParams& p) {
  validate(p);
  StationarySet set;
  switch (rule) {
    case UpdateRule::Replicator:
    case UpdateRule::Moran:
    case UpdateRule::Fermi:
      set.points.push_back({EquilibriumKind::DepletedLine, {0.0, 0.0}});
      set.points.push_back({EquilibriumKind::SustainablePoint, {1.0 - p.ec_hat, 1.0}});
      break;
    case UpdateRule::Linear: {
      const double denom = 1.0 - p.ec_hat + p.ed_hat;
      set.points.push_back({EquilibriumKind::DepletedPoint, {0.0, 1.0}});
      set.points.push_back(
          {EquilibriumKind::SustainablePoint, {(1.0 - p.ec_hat) / denom, p.ed_hat / denom}});
      break;
    }
    case UpdateRule::UnitStep:
      set.points.push_back({EquilibriumKind::DepletedPoint, {0.0, 1.0}});
      set.points.push_back({EquilibriumKind::SustainablePoint, {1.0 - p.ec_hat, 1.0}});
      break;
    case UpdateRule::Logistic: {
      // R = 0 kills dR/dt for every x; dx/dt = 0 then pins x.
      set.points.push_back(
          {EquilibriumKind::DepletedPoint, {0.0, 1.0 - logistic_sigmoid(-p.k * p.c)}});
      StationarySet interior = logistic_interior_points(p);
      set.points.insert(set.points.end(), interior.points.begin(), interior.points.end());
      set.diagnostic = std::move(interior.diagnostic);
      break;
    }
  }
  return set;
}

StationarySet logistic_interior_points(const ModelParams& p, const FixedPointSearch& search) {
  StationarySet set;
  const int n = std::max(search.seeds_per_axis, 1);
  const double d = search.damping;
  int converged_runs = 0;

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
      SystemState s{i / denom, j / denom};
      bool converged = false;
      for (int it = 0; it < search.max_iterations; ++it) {
        const SystemState target{resource_nullcline(p, s.x),
                                 1.0 - logistic_sigmoid(p.k * (s.R - p.c))};
        const SystemState next{(1.0 - d) * s.R + d * target.R, (1.0 - d) * s.x + d * target.x};
        const double change = std::max(std::abs(next.R - s.R), std::abs(next.x - s.x));
        s = next;
        if (!std::isfinite(s.R) || !std::isfinite(s.x)) break;
        if (change < search.tolerance) {
          converged = true;
          break;
        }
      }
      if (!converged) continue;
      ++converged_runs;
      // Roots with R <= 0 belong to the depleted branch, handled in closed form.
      if (!(s.R > 0.0) || !in_unit_box(s)) continue;
      const bool duplicate = std::any_of(set.points.begin(), set.points.end(), [&](const auto& e) {
        return std::hypot(e.state.R - s.R, e.state.x - s.x) < search.dedup_radius;
      });
      if (!duplicate) set.points.push_back({EquilibriumKind::NumericalFixedPoint, s});
    }
  }

  if (set.points.empty()) {
    std::ostringstream msg;
    if (converged_runs == 0) {
      msg << "damped fixed-point iteration did not converge from any of " << n * n
          << " seeds within " << search.max_iterations << " iterations";
    } else {
      msg << "no interior fixed point with R > 0 (" << converged_runs << " of " << n * n
          << " seeds converged onto the depleted branch)";
    }
    set.diagnostic = msg.str();
  }
  return set;
}

Matrix2 jacobian(UpdateRule rule, const ModelParams& p, SystemState s, double h) {
  require_differentiable(rule, p, s, h);
  const Derivative r_plus = coupled_derivative(rule, {s.R + h, s.x}, p);
  const Derivative r_minus = coupled_derivative(rule, {s.R - h, s.x}, p);
  const Derivative x_plus = coupled_derivative(rule, {s.R, s.x + h}, p);
  const Derivative x_minus = coupled_derivative(rule, {s.R, s.x - h}, p);
  const double inv = 0.5 / h;
  return {{{(r_plus.dR - r_minus.dR) * inv, (x_plus.dR - x_minus.dR) * inv},
           {(r_plus.dx - r_minus.dx) * inv, (x_plus.dx - x_minus.dx) * inv}}};
}

Matrix2 analytic_jacobian(UpdateRule rule, const ModelParams& p, SystemState s) {
  require_differentiable(rule, p, s, kJacobianStep);
  const double R = s.R;
  const double x = s.x;
  Matrix2 m{};
  m[0][0] = p.T * (1.0 - 2.0 * R - (x * p.ec_hat + (1.0 - x) * p.ed_hat));
  m[0][1] = -p.T * R * (p.ec_hat - p.ed_hat);

  switch (rule) {
    case UpdateRule::Replicator:
      m[1][0] = -p.w * x * (1.0 - x);
      m[1][1] = -p.w * R * (1.0 - 2.0 * x);
      break;
    case UpdateRule::Moran: {
      const double a = p.w * (p.ec() - p.ed());
      const double denom = moran_denominator(s, p);
      const double mix = x * p.ec() + (1.0 - x) * p.ed();
      const double f = a * R * x * (1.0 - x);
      m[1][0] = a * x * (1.0 - x) / denom - f * p.w * mix / (denom * denom);
      m[1][1] = a * R * (1.0 - 2.0 * x) / denom - f * p.w * R * (p.ec() - p.ed()) / (denom * denom);
      break;
    }
    case UpdateRule::Fermi: {
      const double b = 0.5 * p.w * (p.ec() - p.ed());
      const double th = std::tanh(b * R);
      m[1][0] = x * (1.0 - x) * b * (1.0 - th * th);
      m[1][1] = (1.0 - 2.0 * x) * th;
      break;
    }
    case UpdateRule::Linear:
      m[1][0] = -1.0;
      m[1][1] = -1.0;
      break;
    case UpdateRule::UnitStep:
      m[1][0] = 0.0;
      m[1][1] = -1.0;
      break;
    case UpdateRule::Logistic: {
      const double sig = logistic_sigmoid(p.k * (R - p.c));
      m[1][0] = -p.k * sig * (1.0 - sig);
      m[1][1] = -1.0;
      break;
    }
  }
  return m;
}

double determinant(const Matrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

double trace(const Matrix2& m) { return m[0][0] + m[1][1]; }

std::array<std::complex<double>, 2> eigenvalues(const Matrix2& m) {
  const double half_tr = 0.5 * trace(m);
  // (a - d)^2 / 4 + b c avoids cancellation in tr^2/4 - det.
  const double half_diff = 0.5 * (m[0][0] - m[1][1]);
  const double disc = half_diff * half_diff + m[0][1] * m[1][0];
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    return {std::complex<double>{half_tr + root, 0.0}, std::complex<double>{half_tr - root, 0.0}};
  }
  const double root = std::sqrt(-disc);
  return {std::complex<double>{half_tr, root}, std::complex<double>{half_tr, -root}};
}

Stability classify(const Matrix2& m, double tol) {
  const double det = determinant(m);
  const double tr = trace(m);
  if (det > tol && tr < -tol) return Stability::Stable;
  if (det < -tol) return Stability::Saddle;
  const auto ev = eigenvalues(m);
  const bool has_zero = std::any_of(ev.begin(), ev.end(),
                                    [&](const auto& l) { return std::abs(l.real()) <= tol; });
  const bool has_growing =
      std::any_of(ev.begin(), ev.end(), [&](const auto& l) { return l.real() > tol; });
  if (has_zero && !has_growing) return Stability::Neutral;
  return Stability::Unstable;
}

EquilibriumReport analyze(UpdateRule rule, const ModelParams& p, const Equilibrium& eq,
                          double tol) {
  EquilibriumReport report;
  report.equilibrium = eq;
  report.jacobian = jacobian(rule, p, eq.state);
  report.eigenvalues = eigenvalues(report.jacobian);
  report.det = determinant(report.jacobian);
  report.trace = trace(report.jacobian);
  report.stability = classify(report.jacobian, tol);
  return report;
}

std::vector<double> default_line_samples() {
  std::vector<double> xs;
  for (int i = 0; i <= 10; ++i) xs.push_back(i / 10.0);
  return xs;
}

std::vector<EquilibriumReport> analyze_all(UpdateRule rule, const ModelParams& p,
                                           const std::vector<double>& line_samples) {
  std::vector<EquilibriumReport> reports;
  for (const Equilibrium& eq : stationary_points(rule, p).points) {
    if (eq.kind == EquilibriumKind::DepletedLine) {
      for (double x : line_samples) {
        reports.push_back(analyze(rule, p, {EquilibriumKind::DepletedLine, {0.0, x}}));
      }
    } else {
      reports.push_back(analyze(rule, p, eq));
    }
  }
  return reports;
}

double neutral_threshold(const ModelParams& p) {
  if (!(p.ed_hat > p.ec_hat)) {
    throw DomainError("neutral threshold requires ed_hat > ec_hat");
  }
  return std::clamp((p.ed_hat - 1.0) / (p.ed_hat - p.ec_hat), 0.0, 1.0);
}

}  // namespace cprdyn
