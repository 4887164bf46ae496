#pragma once

// Coupled resource / strategy dynamics.
//
// The resource R in [0,1] grows logistically (carrying capacity 1) and is
// harvested by cooperators at the normalized rate ec_hat and by defectors at
// ed_hat.  The cooperator fraction x evolves as T+ - T-, the difference of the
// D->C and C->D transition probabilities of one of six update rules.

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace cprdyn {

struct ModelParams {
  double T = 2.0;        // natural growth rate
  double ec_hat = 0.7;   // N e_C / T, in (0,1)
  double ed_hat = 2.0;   // N e_D / T, > 1
  double w = -1.0;       // greed, in [-1, 0]
  double c = 0.5;        // resource threshold of the unit-step / logistic rules
  double k = 10.0;       // logistic intensity
  int N = 100;           // population size

  // Raw per-player extraction rates.
  double ec() const { return T * ec_hat / N; }
  double ed() const { return T * ed_hat / N; }

  // Payoff gap at R = 1.
  double delta_u_max() const { return ed() - ec(); }

  bool operator==(const ModelParams&) const = default;
};

// Throws ValidationError naming the first violated constraint.  Includes the
// Moran positivity bound 1 - w + w U > 0 over every reachable mean payoff U.
void validate(const ModelParams& p);

struct SystemState {
  double R = 0.0;
  double x = 0.0;

  bool operator==(const SystemState&) const = default;
};

bool in_unit_box(SystemState s);
SystemState clamp_to_box(SystemState s);

enum class UpdateRule { Replicator, Moran, Fermi, Linear, UnitStep, Logistic };

inline constexpr std::array<UpdateRule, 6> kAllRules = {
    UpdateRule::Replicator, UpdateRule::Moran,    UpdateRule::Fermi,
    UpdateRule::Linear,     UpdateRule::UnitStep, UpdateRule::Logistic};

// Replicator, Moran and Fermi compare payoffs of two players; the other three
// react to the resource level only.
constexpr bool is_pairwise(UpdateRule rule) {
  return rule == UpdateRule::Replicator || rule == UpdateRule::Moran ||
         rule == UpdateRule::Fermi;
}

// CLI spelling: replicator, moran, fermi, linear, unit-step, logistic.
std::string_view rule_name(UpdateRule rule);
std::optional<UpdateRule> parse_rule(std::string_view name);
// "replicator|moran|fermi|linear|unit-step|logistic"
std::string rule_names_joined(std::string_view sep = "|");
std::string_view rule_description(UpdateRule rule);

struct Payoffs {
  double u_c = 0.0;
  double u_d = 0.0;
  double u_mean = 0.0;
};

Payoffs payoffs(SystemState s, const ModelParams& p);

// Heaviside step with theta(0) = 1.
constexpr double heaviside(double z) { return z >= 0.0 ? 1.0 : 0.0; }
double logistic_sigmoid(double z);

// 1 - w + w <U>; throws DomainError when not strictly positive.
double moran_denominator(SystemState s, const ModelParams& p);

double resource_derivative(SystemState s, const ModelParams& p);
double strategy_derivative(UpdateRule rule, SystemState s, const ModelParams& p);

struct Derivative {
  double dR = 0.0;
  double dx = 0.0;
};

Derivative coupled_derivative(UpdateRule rule, SystemState s, const ModelParams& p);

struct SwitchProbabilities {
  double p_dc = 0.0;  // defector -> cooperator
  double p_cd = 0.0;  // cooperator -> defector
};

SwitchProbabilities switch_probabilities(UpdateRule rule, SystemState s,
                                         const ModelParams& p);

struct TransitionRates {
  double t_plus = 0.0;   // T^{D->C}
  double t_minus = 0.0;  // T^{C->D}
};

// Per-update probabilities of gaining / losing one cooperator at fraction x.
// Pairwise rules pick an (i, j) pair: x(1-x) p.  Resource-driven rules pick one
// player: (1-x) p_dc and x p_cd.
TransitionRates transition_rates(UpdateRule rule, SystemState s, const ModelParams& p);

}  // namespace cprdyn
