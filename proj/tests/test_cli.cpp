#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cprdyn/cli.hpp"
#include "cprdyn/errors.hpp"

using namespace cprdyn;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("cprdyn_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("defaults match the reference configuration") {
  const RunDescription d = parse_and_validate({"simulate", "--rule", "replicator"});
  CHECK(d.command == "simulate");
  CHECK(d.rule == UpdateRule::Replicator);
  CHECK(d.params.T == 2.0);
  CHECK(d.params.ec_hat == 0.7);
  CHECK(d.params.ed_hat == 2.0);
  CHECK(d.params.w == -1.0);
  CHECK(d.params.c == 0.5);
  CHECK(d.params.k == 10.0);
  CHECK(d.params.N == 100);
  CHECK(d.format == OutputFormat::Csv);

  const RunDescription sweep = parse_and_validate({"sweep"});
  CHECK(sweep.integrator.dt == 0.1);
  CHECK(sweep.grid.n_r == 101);
  const RunDescription custom = parse_and_validate({"sweep", "--grid", "21x31", "--dt", "0.01"});
  CHECK(custom.grid.n_r == 21);
  CHECK(custom.grid.n_x == 31);
  CHECK(custom.integrator.dt == 0.01);
}

TEST_CASE("flags before and after the subcommand are equivalent") {
  const RunDescription a = parse_and_validate({"--rule", "fermi", "--w", "-0.5", "equilibria"});
  const RunDescription b = parse_and_validate({"equilibria", "--rule", "fermi", "--w", "-0.5"});
  CHECK(a.rule == b.rule);
  CHECK(a.params == b.params);
  CHECK(a.params.w == -0.5);
}

TEST_CASE("invalid parameters are rejected with the violated condition") {
  const Result high = run({"equilibria", "--ec-hat", "1.2"});
  CHECK(high.code == 1);
  CHECK(high.err.find("ec_hat < 1") != std::string::npos);

  const Result low = run({"equilibria", "--ed-hat", "0.9"});
  CHECK(low.code == 1);
  CHECK(low.err.find("ed_hat > 1") != std::string::npos);

  const Result moran = run({"equilibria", "--rule", "moran", "--w", "-1", "--ed-hat", "2", "--N", "1"});
  CHECK(moran.code == 1);
  CHECK(moran.err.find("Moran") != std::string::npos);

  const Result rule = run({"simulate", "--rule", "imitation"});
  CHECK(rule.code == 1);
  for (const char* name : {"replicator", "moran", "fermi", "linear", "unit-step", "logistic"}) {
    CHECK(rule.err.find(name) != std::string::npos);
  }

  CHECK(run({"simulate", "--bogus", "1"}).code == 1);
  CHECK(run({"simulate", "--grid", "10by10"}).code == 1);
  CHECK(run({"simulate", "--format", "xml"}).code == 1);
  CHECK(run({"simulate", "--x0", "1.5"}).code == 1);
  CHECK(run({}).code == 1);
}

TEST_CASE("config file values yield to flags") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "run.ini";
  std::ofstream(cfg) << "rule = linear\nec-hat = 0.6\nw = -0.5\n";
  const RunDescription d =
      parse_and_validate({"equilibria", "--config", cfg.string(), "--ec-hat", "0.5"});
  CHECK(d.rule == UpdateRule::Linear);
  CHECK(d.params.ec_hat == 0.5);
  CHECK(d.params.w == -0.5);

  std::ofstream(cfg) << "rule = linear\nnot-a-flag = 3\n";
  CHECK_THROWS_AS(parse_and_validate({"equilibria", "--config", cfg.string()}), ValidationError);
}

TEST_CASE("equilibria report for the linear rule") {
  TempDir tmp;
  const Result r = run({"equilibria", "--rule", "linear", "--format", "json", "--output",
                        tmp.path.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(tmp.path / "equilibria.json"));
  CHECK(j["rule"] == "linear");
  bool found = false;
  for (const auto& e : j["equilibria"]) {
    if (e["kind"] != "sustainable_point") continue;
    found = true;
    CHECK(std::abs(e["R"].get<double>() - 0.1304348) < 1e-7);
    CHECK(std::abs(e["x"].get<double>() - 0.8695652) < 1e-7);
    CHECK(e["stability"] == "stable");
  }
  CHECK(found);
  CHECK(fs::exists(tmp.path / "equilibria.manifest.json"));

  REQUIRE(run({"equilibria", "--rule", "linear", "--output", tmp.path.string()}).code == 0);
  const std::string csv = slurp(tmp.path / "equilibria.csv");
  CHECK(csv.rfind("kind,R,x,det,trace,eig1_re,eig1_im,eig2_re,eig2_im,stability\n", 0) == 0);
}

TEST_CASE("simulate from the fixed point writes a constant trajectory") {
  TempDir tmp;
  REQUIRE(run({"simulate", "--rule", "replicator", "--r0", "0.3", "--x0", "1", "--output",
               tmp.path.string()})
              .code == 0);
  std::istringstream csv(slurp(tmp.path / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,R,x");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const auto comma = line.find(',');
    CHECK(line.substr(comma + 1) == "0.3,1");
  }
  CHECK(rows >= 2);

  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "simulate.manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["rule"] == "replicator");
  CHECK(manifest["params"]["w"] == -1.0);
  CHECK(manifest["params"]["ec_hat"] == 0.7);
  CHECK(manifest["outputs"].size() == 1);
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.contains("wall_time_s"));
}

TEST_CASE("weak logistic sweep is all depleted") {
  TempDir tmp;
  REQUIRE(run({"sweep", "--rule", "logistic", "--k", "0.1", "--grid", "21x21", "--output",
               tmp.path.string()})
              .code == 0);
  std::istringstream csv(slurp(tmp.path / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "R0,x0,R_star,x_star,class,steps");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.find(",depleted,") != std::string::npos);
  }
  CHECK(rows == 441);
  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "sweep.manifest.json"));
  CHECK(manifest["summary"]["depleted"] == 441);
}

TEST_CASE("replaying a manifest reproduces the data bytes") {
  struct Case {
    std::vector<std::string> args;
    std::string data;
  };
  const std::vector<Case> cases = {
      {{"sweep", "--rule", "fermi", "--grid", "11x9"}, "sweep.csv"},
      {{"ensemble", "--rule", "moran", "--replicas", "12", "--t-end", "2", "--seed", "99"},
       "ensemble.csv"},
      {{"simulate", "--rule", "unit-step", "--t-max", "5", "--format", "json"}, "trajectory.json"},
      {{"equilibria", "--rule", "logistic"}, "equilibria.csv"}};
  for (const Case& c : cases) {
    INFO(c.args.front());
    TempDir first;
    TempDir second;
    std::vector<std::string> args = c.args;
    args.insert(args.end(), {"--output", first.path.string()});
    REQUIRE(run(args).code == 0);

    const auto manifest =
        nlohmann::json::parse(slurp(first.path / (c.args.front() + ".manifest.json")));
    std::vector<std::string> replay = manifest["args"].get<std::vector<std::string>>();
    replay.insert(replay.end(), {"--output", second.path.string()});
    REQUIRE(run(replay).code == 0);
    CHECK(slurp(first.path / c.data) == slurp(second.path / c.data));
    CHECK_FALSE(slurp(first.path / c.data).empty());
  }
}

TEST_CASE("ensemble manifest records the seed and population") {
  TempDir tmp;
  REQUIRE(run({"ensemble", "--replicas", "4", "--t-end", "1", "--seed", "7", "--N", "50",
               "--output", tmp.path.string()})
              .code == 0);
  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "ensemble.manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["params"]["N"] == 50);
  CHECK(manifest["settings"]["ensemble"]["replicas"] == 4);
  CHECK(slurp(tmp.path / "ensemble.csv").rfind("t,mean_R,std_R,mean_x,std_x\n", 0) == 0);
}

TEST_CASE("unwritable output directory exits with the i/o code") {
  TempDir tmp;
  const fs::path blocker = tmp.path / "file";
  std::ofstream(blocker) << "x";
  const Result r = run({"equilibria", "--output", (blocker / "sub").string()});
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("numerical failures exit with the numerical code") {
  TempDir tmp;
  const Result r = run({"simulate", "--dt", "1e200", "--t-max", "1e201", "--output",
                        tmp.path.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("non-finite") != std::string::npos);
}

TEST_CASE("rules and help") {
  const Result rules = run({"rules"});
  CHECK(rules.code == 0);
  for (const char* name : {"replicator", "moran", "fermi", "linear", "unit-step", "logistic"}) {
    CHECK(rules.out.find(name) != std::string::npos);
  }
  const Result help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--ec-hat") != std::string::npos);
}
