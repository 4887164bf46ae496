#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cprdyn/model.hpp"

namespace cprdyn {

using Matrix2 = std::array<std::array<double, 2>, 2>;  // row-major, rows (dR, dx)

enum class EquilibriumKind { DepletedPoint, DepletedLine, SustainablePoint, NumericalFixedPoint };

// For DepletedLine, state.x is the sampled point on the line {R = 0}.
struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::NumericalFixedPoint;
  SystemState state;
};

enum class Stability { Stable, Unstable, Saddle, Neutral };

std::string_view kind_name(EquilibriumKind kind);
std::string_view stability_name(Stability s);

struct StationarySet {
  std::vector<Equilibrium> points;
  std::optional<std::string> diagnostic;  // set when a numerical search found nothing
};

// Closed-form stationary points for the five analytic rules.  The logistic
// rule gets its depleted point (0, 1 - sigma(-k c)) in closed form and its
// interior points by damped fixed-point iteration on the nullclines.
StationarySet stationary_points(UpdateRule rule, const ModelParams& p);

struct FixedPointSearch {
  double damping = 0.5;
  int max_iterations = 10000;
  double tolerance = 1e-12;
  int seeds_per_axis = 5;
  double dedup_radius = 1e-6;
};

// Interior (R > 0) equilibria of the logistic rule.
StationarySet logistic_interior_points(const ModelParams& p, const FixedPointSearch& search = {});

inline constexpr double kJacobianStep = 1e-6;

// Central finite differences of coupled_derivative.  Throws DomainError for the
// unit-step rule within h of R = c.
Matrix2 jacobian(UpdateRule rule, const ModelParams& p, SystemState s, double h = kJacobianStep);

// Hand-derived partial derivatives; same domain restriction as jacobian().
Matrix2 analytic_jacobian(UpdateRule rule, const ModelParams& p, SystemState s);

double determinant(const Matrix2& m);
double trace(const Matrix2& m);
std::array<std::complex<double>, 2> eigenvalues(const Matrix2& m);

inline constexpr double kStabilityTol = 1e-8;

// Stable: Det > tol and Tr < -tol.  Saddle: Det < -tol.  Neutral: an eigenvalue
// with |Re| <= tol and none with Re > tol.  Unstable otherwise.
Stability classify(const Matrix2& m, double tol = kStabilityTol);

struct EquilibriumReport {
  Equilibrium equilibrium;
  Matrix2 jacobian{};
  std::array<std::complex<double>, 2> eigenvalues{};
  double det = 0.0;
  double trace = 0.0;
  Stability stability = Stability::Neutral;
};

EquilibriumReport analyze(UpdateRule rule, const ModelParams& p, const Equilibrium& eq,
                          double tol = kStabilityTol);

// Every stationary point analyzed; a DepletedLine is expanded into reports at
// each of line_samples (x values).
std::vector<EquilibriumReport> analyze_all(UpdateRule rule, const ModelParams& p,
                                           const std::vector<double>& line_samples);

std::vector<double> default_line_samples();

// (ed_hat - 1) / (ed_hat - ec_hat), clamped to [0,1]: the depleted line is
// neutral below this cooperator fraction and unstable above it.
double neutral_threshold(const ModelParams& p);

}  // namespace cprdyn
