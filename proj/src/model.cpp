#include "cprdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cprdyn/errors.hpp"

namespace cprdyn {

namespace {

struct RuleInfo {
  UpdateRule rule;
  std::string_view name;
  std::string_view description;
};

constexpr std::array<RuleInfo, 6> kRuleTable = {{
    {UpdateRule::Replicator, "replicator", "dx/dt = -w R x (1-x)"},
    {UpdateRule::Moran, "moran",
     "dx/dt = w R x (1-x) (e_C - e_D) / (1 - w + w (x R e_C + (1-x) R e_D))"},
    {UpdateRule::Fermi, "fermi", "dx/dt = x (1-x) tanh(w/2 (R e_C - R e_D))"},
    {UpdateRule::Linear, "linear", "dx/dt = 1 - x - R"},
    {UpdateRule::UnitStep, "unit-step", "dx/dt = 1 - x - theta[R - c]"},
    {UpdateRule::Logistic, "logistic", "dx/dt = 1 - x - 1/(1 + exp(-k (R - c)))"},
}};

const RuleInfo& info(UpdateRule rule) {
  for (const auto& entry : kRuleTable) {
    if (entry.rule == rule) return entry;
  }
  return kRuleTable.front();
}

[[noreturn]] void reject(const std::string& what) { throw ValidationError(what); }

// Probability that a cooperator turns defector under a resource-driven rule.
double resource_switch_probability(UpdateRule rule, double R, const ModelParams& p) {
  switch (rule) {
    case UpdateRule::Linear:
      return R;
    case UpdateRule::UnitStep:
      return heaviside(R - p.c);
    case UpdateRule::Logistic:
      return logistic_sigmoid(p.k * (R - p.c));
    default:
      return 0.0;
  }
}

}  // namespace

void validate(const ModelParams& p) {
  const bool finite = std::isfinite(p.T) && std::isfinite(p.ec_hat) &&
                      std::isfinite(p.ed_hat) && std::isfinite(p.w) &&
                      std::isfinite(p.c) && std::isfinite(p.k);
  if (!finite) reject("model parameters must be finite");
  if (!(p.T > 0.0)) reject("growth rate must satisfy T > 0");
  if (p.N < 1) reject("population size must satisfy N >= 1");
  if (!(p.ec_hat > 0.0)) reject("cooperator extraction must satisfy ec_hat > 0 (0 < N e_C)");
  if (!(p.ec_hat < 1.0)) reject("cooperator extraction must satisfy ec_hat < 1 (N e_C < T)");
  if (!(p.ed_hat > 1.0)) reject("defector extraction must satisfy ed_hat > 1 (T < N e_D)");
  if (!(p.w >= -1.0 && p.w <= 0.0)) reject("greed parameter must satisfy -1 <= w <= 0");
  if (!(p.c > 0.0 && p.c < 1.0)) reject("threshold must satisfy 0 < c < 1");
  if (!(p.k > 0.0)) reject("logistic intensity must satisfy k > 0");

  // <U> ranges over [0, e_D]; with w <= 0 the denominator is smallest at e_D.
  const double worst = 1.0 - p.w + p.w * p.ed();
  if (!(worst > 0.0)) {
    std::ostringstream msg;
    msg << "Moran denominator must satisfy 1 - w + w U > 0 for all reachable payoffs U;"
        << " at U = e_D = " << p.ed() << " it is " << worst
        << " (need e_D < 1 + 1/|w|; increase N or reduce ed_hat, T or |w|)";
    reject(msg.str());
  }
}

bool in_unit_box(SystemState s) {
  return s.R >= 0.0 && s.R <= 1.0 && s.x >= 0.0 && s.x <= 1.0;
}

SystemState clamp_to_box(SystemState s) {
  return {std::clamp(s.R, 0.0, 1.0), std::clamp(s.x, 0.0, 1.0)};
}

std::string_view rule_name(UpdateRule rule) { return info(rule).name; }

std::string_view rule_description(UpdateRule rule) { return info(rule).description; }

std::optional<UpdateRule> parse_rule(std::string_view name) {
  for (const auto& entry : kRuleTable) {
    if (entry.name == name) return entry.rule;
  }
  return std::nullopt;
}

std::string rule_names_joined(std::string_view sep) {
  std::string out;
  for (const auto& entry : kRuleTable) {
    if (!out.empty()) out += sep;
    out += entry.name;
  }
  return out;
}

Payoffs payoffs(SystemState s, const ModelParams& p) {
  Payoffs u;
  u.u_c = s.R * p.ec();
  u.u_d = s.R * p.ed();
  u.u_mean = s.x * u.u_c + (1.0 - s.x) * u.u_d;
  return u;
}

double logistic_sigmoid(double z) {
  // Evaluated on the side that cannot overflow.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double moran_denominator(SystemState s, const ModelParams& p) {
  const double denom = 1.0 - p.w + p.w * payoffs(s, p).u_mean;
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "Moran denominator 1 - w + w<U> = " << denom << " is not positive at R=" << s.R
        << ", x=" << s.x;
    throw DomainError(msg.str());
  }
  return denom;
}

double resource_derivative(SystemState s, const ModelParams& p) {
  const double extraction = s.x * p.ec_hat + (1.0 - s.x) * p.ed_hat;
  return p.T * (s.R * (1.0 - s.R) - s.R * extraction);
}

double strategy_derivative(UpdateRule rule, SystemState s, const ModelParams& p) {
  const double R = s.R;
  const double x = s.x;
  switch (rule) {
    case UpdateRule::Replicator:
      return -p.w * R * x * (1.0 - x);
    case UpdateRule::Moran:
      return p.w * R * x * (1.0 - x) * (p.ec() - p.ed()) / moran_denominator(s, p);
    case UpdateRule::Fermi:
      return x * (1.0 - x) * std::tanh(0.5 * p.w * (R * p.ec() - R * p.ed()));
    case UpdateRule::Linear:
    case UpdateRule::UnitStep:
    case UpdateRule::Logistic:
      return 1.0 - x - resource_switch_probability(rule, R, p);
  }
  return 0.0;
}

Derivative coupled_derivative(UpdateRule rule, SystemState s, const ModelParams& p) {
  return {resource_derivative(s, p), strategy_derivative(rule, s, p)};
}

SwitchProbabilities switch_probabilities(UpdateRule rule, SystemState s,
                                         const ModelParams& p) {
  const Payoffs u = payoffs(s, p);
  switch (rule) {
    case UpdateRule::Replicator:
      // 1/2 + w/2 (U_j - U_i) / (e_D - e_C) with U_D - U_C = R (e_D - e_C).
      return {0.5 - 0.5 * p.w * s.R, 0.5 + 0.5 * p.w * s.R};
    case UpdateRule::Moran: {
      const double denom = moran_denominator(s, p);
      return {(1.0 - p.w + p.w * u.u_c) / denom, (1.0 - p.w + p.w * u.u_d) / denom};
    }
    case UpdateRule::Fermi:
      return {logistic_sigmoid(p.w * (u.u_c - u.u_d)), logistic_sigmoid(p.w * (u.u_d - u.u_c))};
    case UpdateRule::Linear:
    case UpdateRule::UnitStep:
    case UpdateRule::Logistic: {
      const double p_cd = resource_switch_probability(rule, s.R, p);
      return {1.0 - p_cd, p_cd};
    }
  }
  return {};
}

TransitionRates transition_rates(UpdateRule rule, SystemState s, const ModelParams& p) {
  const SwitchProbabilities sp = switch_probabilities(rule, s, p);
  const double x = s.x;
  if (is_pairwise(rule)) {
    const double pair = x * (1.0 - x);
    return {pair * sp.p_dc, pair * sp.p_cd};
  }
  return {(1.0 - x) * sp.p_dc, x * sp.p_cd};
}

}  // namespace cprdyn
