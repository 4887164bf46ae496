#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cprdyn/integrator.hpp"
#include "cprdyn/model.hpp"

namespace cprdyn {

// Initial-condition grid, endpoints inclusive.  R0 = 0 is excluded because the
// depleted line absorbs it trivially.
struct GridSpec {
  double r0_min = 0.01;
  double r0_max = 1.0;
  double x0_min = 0.0;
  double x0_max = 1.0;
  int n_r = 101;
  int n_x = 101;

  double r0_at(int i) const;
  double x0_at(int j) const;
};

void validate(const GridSpec& grid);

enum class Outcome { Depleted, Sustainable, Unresolved };

std::string_view outcome_name(Outcome o);

inline constexpr double kDepletionThreshold = 1e-4;

// Depleted when R < 1e-4 whatever the terminal flag; Sustainable when the run
// converged (or ended in a settled chattering average); Unresolved otherwise.
Outcome classify_endpoint(const Endpoint& end);

struct BasinCell {
  SystemState initial;
  SystemState final_state;
  Outcome outcome = Outcome::Unresolved;
  std::int64_t steps = 0;
  std::string diagnostic;  // non-empty when the integration threw
};

struct BasinMap {
  GridSpec grid;
  std::vector<BasinCell> cells;  // row-major: R0 index outer, x0 index inner

  const BasinCell& at(int i, int j) const {
    return cells[static_cast<std::size_t>(i) * static_cast<std::size_t>(grid.n_x) +
                 static_cast<std::size_t>(j)];
  }
  std::size_t count(Outcome o) const;
};

// One integrate_to_equilibrium per cell, spread over `threads` workers
// (0 = hardware concurrency).  Results do not depend on the thread count.
BasinMap run_basin_sweep(UpdateRule rule, const ModelParams& p, const GridSpec& grid,
                         const IntegratorConfig& cfg, unsigned threads = 0);

}  // namespace cprdyn
