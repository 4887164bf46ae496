#include "cprdyn/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "cprdyn/errors.hpp"
#include "cprdyn/parallel.hpp"

namespace cprdyn {

namespace {

double lerp_axis(double lo, double hi, int i, int n) {
  if (i == n - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

double GridSpec::r0_at(int i) const { return lerp_axis(r0_min, r0_max, i, n_r); }

double GridSpec::x0_at(int j) const { return lerp_axis(x0_min, x0_max, j, n_x); }

void validate(const GridSpec& grid) {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(grid.r0_min) || !in_unit(grid.r0_max) || !in_unit(grid.x0_min) ||
      !in_unit(grid.x0_max)) {
    throw ValidationError("grid bounds must lie in [0,1]");
  }
  if (!(grid.r0_min > 0.0)) throw ValidationError("grid requires r0_min > 0");
  if (grid.r0_min > grid.r0_max || grid.x0_min > grid.x0_max) {
    throw ValidationError("grid bounds must satisfy min <= max");
  }
  if (grid.n_r < 2 || grid.n_x < 2) throw ValidationError("grid needs at least 2 points per axis");
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Depleted:
      return "depleted";
    case Outcome::Sustainable:
      return "sustainable";
    case Outcome::Unresolved:
      return "unresolved";
  }
  return "unresolved";
}

Outcome classify_endpoint(const Endpoint& end) {
  if (end.state.R < kDepletionThreshold) return Outcome::Depleted;
  if (end.terminal == Terminal::Converged) return Outcome::Sustainable;
  if (end.chattering_average && end.chattering_settled) return Outcome::Sustainable;
  return Outcome::Unresolved;
}

std::size_t BasinMap::count(Outcome o) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [o](const BasinCell& c) { return c.outcome == o; }));
}

BasinMap run_basin_sweep(UpdateRule rule, const ModelParams& p, const GridSpec& grid,
                         const IntegratorConfig& cfg, unsigned threads) {
  validate(p);
  validate(grid);
  validate(cfg);

  BasinMap map;
  map.grid = grid;
  map.cells.resize(static_cast<std::size_t>(grid.n_r) * static_cast<std::size_t>(grid.n_x));

  parallel_for(map.cells.size(), threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / static_cast<std::size_t>(grid.n_x));
    const int j = static_cast<int>(idx % static_cast<std::size_t>(grid.n_x));
    BasinCell& cell = map.cells[idx];
    cell.initial = {grid.r0_at(i), grid.x0_at(j)};
    try {
      const Endpoint end = integrate_to_equilibrium(rule, p, cell.initial, cfg);
      cell.final_state = end.state;
      cell.steps = end.steps;
      cell.outcome = classify_endpoint(end);
    } catch (const std::exception& e) {
      cell.final_state = cell.initial;
      cell.outcome = Outcome::Unresolved;
      cell.diagnostic = e.what();
    }
  });
  return map;
}

}  // namespace cprdyn
