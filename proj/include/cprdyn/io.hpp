#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cprdyn/equilibria.hpp"
#include "cprdyn/integrator.hpp"
#include "cprdyn/model.hpp"
#include "cprdyn/stochastic.hpp"
#include "cprdyn/sweep.hpp"

namespace cprdyn {

std::string_view tool_version();

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Writes to a temporary sibling and renames it into place.  Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// CSV header: t,R,x
std::string trajectory_csv(const Trajectory& traj);
nlohmann::json trajectory_json(const Trajectory& traj);

// CSV header: R0,x0,R_star,x_star,class,steps
std::string sweep_csv(const BasinMap& map);
nlohmann::json sweep_json(const BasinMap& map);

// CSV header: t,mean_R,std_R,mean_x,std_x
std::string ensemble_csv(const EnsembleStats& stats);
nlohmann::json ensemble_json(const EnsembleStats& stats);

nlohmann::json params_json(const ModelParams& p);
nlohmann::json integrator_json(const IntegratorConfig& cfg);
nlohmann::json grid_json(const GridSpec& grid);

// {rule, params, equilibria: [{kind, R, x, det, trace, eigenvalues, stability}]}
nlohmann::json equilibria_json(UpdateRule rule, const ModelParams& p,
                               const std::vector<EquilibriumReport>& reports,
                               const std::optional<std::string>& diagnostic = std::nullopt);
// CSV header: kind,R,x,det,trace,eig1_re,eig1_im,eig2_re,eig2_im,stability
std::string equilibria_csv(const std::vector<EquilibriumReport>& reports);

struct RunManifest {
  std::string tool_version;
  std::string command;
  std::string rule;
  ModelParams params;
  nlohmann::json settings = nlohmann::json::object();  // integrator / grid / ensemble
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  std::vector<std::string> args;  // effective command line; replays the run
  nlohmann::json summary = nlohmann::json::object();
  double wall_time_s = 0.0;
};

nlohmann::json to_json(const RunManifest& m);

}  // namespace cprdyn
