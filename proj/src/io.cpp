#include "cprdyn/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <system_error>

#include "cprdyn/errors.hpp"

#ifndef CPRDYN_VERSION
#define CPRDYN_VERSION "0.0.0"
#endif

namespace cprdyn {

namespace {

nlohmann::json complex_json(std::complex<double> z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace

std::string_view tool_version() { return CPRDYN_VERSION; }

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,R,x\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += format_double(traj.times[i]);
    out += ',';
    out += format_double(traj.states[i].R);
    out += ',';
    out += format_double(traj.states[i].x);
    out += '\n';
  }
  return out;
}

nlohmann::json trajectory_json(const Trajectory& traj) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    rows.push_back({{"t", traj.times[i]}, {"R", traj.states[i].R}, {"x", traj.states[i].x}});
  }
  return {{"terminal", traj.terminal == Terminal::Converged ? "converged" : "horizon_reached"},
          {"samples", std::move(rows)}};
}

std::string sweep_csv(const BasinMap& map) {
  std::string out = "R0,x0,R_star,x_star,class,steps\n";
  for (const BasinCell& cell : map.cells) {
    out += format_double(cell.initial.R);
    out += ',';
    out += format_double(cell.initial.x);
    out += ',';
    out += format_double(cell.final_state.R);
    out += ',';
    out += format_double(cell.final_state.x);
    out += ',';
    out += outcome_name(cell.outcome);
    out += ',';
    out += std::to_string(cell.steps);
    out += '\n';
  }
  return out;
}

nlohmann::json sweep_json(const BasinMap& map) {
  nlohmann::json cells = nlohmann::json::array();
  for (const BasinCell& cell : map.cells) {
    nlohmann::json row = {{"R0", cell.initial.R},       {"x0", cell.initial.x},
                          {"R_star", cell.final_state.R}, {"x_star", cell.final_state.x},
                          {"class", outcome_name(cell.outcome)}, {"steps", cell.steps}};
    if (!cell.diagnostic.empty()) row["diagnostic"] = cell.diagnostic;
    cells.push_back(std::move(row));
  }
  return {{"grid", grid_json(map.grid)}, {"cells", std::move(cells)}};
}

std::string ensemble_csv(const EnsembleStats& stats) {
  std::string out = "t,mean_R,std_R,mean_x,std_x\n";
  for (std::size_t k = 0; k < stats.sample_times.size(); ++k) {
    out += format_double(stats.sample_times[k]);
    out += ',';
    out += format_double(stats.mean_R[k]);
    out += ',';
    out += format_double(stats.std_R[k]);
    out += ',';
    out += format_double(stats.mean_x[k]);
    out += ',';
    out += format_double(stats.std_x[k]);
    out += '\n';
  }
  return out;
}

nlohmann::json ensemble_json(const EnsembleStats& stats) {
  return {{"replicas", stats.replicas}, {"seed", stats.seed},
          {"t", stats.sample_times},    {"mean_R", stats.mean_R},
          {"std_R", stats.std_R},       {"mean_x", stats.mean_x},
          {"std_x", stats.std_x}};
}

nlohmann::json params_json(const ModelParams& p) {
  return {{"T", p.T}, {"ec_hat", p.ec_hat}, {"ed_hat", p.ed_hat}, {"w", p.w}, {"c", p.c},
          {"k", p.k}, {"N", p.N},           {"e_C", p.ec()},      {"e_D", p.ed()}};
}

nlohmann::json integrator_json(const IntegratorConfig& cfg) {
  return {{"dt", cfg.dt},
          {"t_max", cfg.t_max},
          {"eps_converge", cfg.eps_converge},
          {"eps_extinct", cfg.eps_extinct},
          {"sample_every", cfg.sample_every},
          {"chatter_tol", cfg.chatter_tol}};
}

nlohmann::json grid_json(const GridSpec& grid) {
  return {{"r0_min", grid.r0_min}, {"r0_max", grid.r0_max}, {"x0_min", grid.x0_min},
          {"x0_max", grid.x0_max}, {"n_r", grid.n_r},       {"n_x", grid.n_x}};
}

nlohmann::json equilibria_json(UpdateRule rule, const ModelParams& p,
                               const std::vector<EquilibriumReport>& reports,
                               const std::optional<std::string>& diagnostic) {
  nlohmann::json list = nlohmann::json::array();
  for (const EquilibriumReport& r : reports) {
    list.push_back({{"kind", kind_name(r.equilibrium.kind)},
                    {"R", r.equilibrium.state.R},
                    {"x", r.equilibrium.state.x},
                    {"det", r.det},
                    {"trace", r.trace},
                    {"eigenvalues", {complex_json(r.eigenvalues[0]), complex_json(r.eigenvalues[1])}},
                    {"stability", stability_name(r.stability)}});
  }
  nlohmann::json out = {{"rule", rule_name(rule)}, {"params", params_json(p)}, {"equilibria", list}};
  if (diagnostic) out["diagnostic"] = *diagnostic;
  return out;
}

std::string equilibria_csv(const std::vector<EquilibriumReport>& reports) {
  std::string out = "kind,R,x,det,trace,eig1_re,eig1_im,eig2_re,eig2_im,stability\n";
  for (const EquilibriumReport& r : reports) {
    out += kind_name(r.equilibrium.kind);
    for (double v : {r.equilibrium.state.R, r.equilibrium.state.x, r.det, r.trace,
                     r.eigenvalues[0].real(), r.eigenvalues[0].imag(), r.eigenvalues[1].real(),
                     r.eigenvalues[1].imag()}) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += stability_name(r.stability);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json out = {{"tool_version", m.tool_version},
                        {"command", m.command},
                        {"rule", m.rule},
                        {"params", params_json(m.params)},
                        {"settings", m.settings},
                        {"outputs", m.outputs},
                        {"args", m.args},
                        {"summary", m.summary},
                        {"wall_time_s", m.wall_time_s}};
  out["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
  return out;
}

}  // namespace cprdyn
