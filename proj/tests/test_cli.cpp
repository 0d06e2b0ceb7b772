#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = NSGP_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("nsgp_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

}  // namespace

TEST_CASE("fit writes the three artifacts with the documented schemas") {
  const fs::path dir = fresh_dir("fit");
  const int code =
      run("fit --kernel stationary --dataset synth --n-points 25 --seed 5 "
          "--iterations 8 --out " + dir.string());
  REQUIRE(code == 0);

  const json report = read_json(dir / "report.json");
  CHECK(report.at("hyper_count") == 2);
  CHECK(report.at("kernel") == "stationary");
  CHECK(report.at("rmse").is_number());
  CHECK(report.at("crps_mean").get<double>() <= 0.0);

  const auto trace = read_lines(dir / "trace.csv");
  REQUIRE(trace.size() >= 2);
  CHECK(trace[0] == "wall_seconds,rmse,crps,log_likelihood");

  const json model = read_json(dir / "model.json");
  CHECK(model.at("format") == "nsgp-model-v1");
}

TEST_CASE("parametric fit reports the 15-hyperparameter layout") {
  const fs::path dir = fresh_dir("fit_para");
  const int code =
      run("fit --kernel parametric --dataset synth --n-points 20 --seed 5 "
          "--iterations 3 --out " + dir.string());
  REQUIRE(code == 0);
  CHECK(read_json(dir / "report.json").at("hyper_count") == 15);
}

TEST_CASE("usage errors exit with code 2") {
  const fs::path dir = fresh_dir("usage");
  CHECK(run("fit --kernel not-a-kernel --dataset synth --out " + dir.string()) == 2);
  CHECK(run("compare --kernel stationary --dataset synth --out " + dir.string()) == 2);
  CHECK(run("definitely-not-a-subcommand") == 2);
  CHECK(run("fit --dataset synth") == 2);  // missing --kernel
}

TEST_CASE("missing dataset files exit with code 3") {
  const fs::path dir = fresh_dir("missing");
  CHECK(run("fit --kernel stationary --dataset /no/such/file.csv --out " +
            dir.string()) == 3);
}

TEST_CASE("predict on a 1-D grid emits one row per grid point") {
  const fs::path dir = fresh_dir("predict");
  REQUIRE(run("fit --kernel stationary --dataset synth --n-points 25 --seed 5 "
              "--iterations 8 --out " + dir.string()) == 0);
  REQUIRE(run("predict --model " + (dir / "model.json").string() +
              " --grid 0:1:101 --out " + dir.string()) == 0);
  const auto lines = read_lines(dir / "predictions.csv");
  REQUIRE(lines.size() == 102);
  CHECK(lines[0] == "x1,post_mean,post_var");
}

TEST_CASE("predicting at a training point of a noise-free model is sharp") {
  const fs::path dir = fresh_dir("sharp");
  REQUIRE(run("fit --kernel stationary --dataset synth --n-points 12 --seed 9 "
              "--iterations 8 --nugget 0 --out " + dir.string()) == 0);
  const json model = read_json(dir / "model.json");
  const double x0 = model.at("data").at("x").at(0).at(0).get<double>();
  std::ostringstream grid;
  grid.precision(17);
  grid << x0;
  REQUIRE(run("predict --model " + (dir / "model.json").string() + " --grid " +
              grid.str() + " --out " + dir.string()) == 0);
  const auto lines = read_lines(dir / "predictions.csv");
  REQUIRE(lines.size() == 2);
  const auto comma = lines[1].rfind(',');
  const double var = std::stod(lines[1].substr(comma + 1));
  CHECK(var <= 1e-8);
}

TEST_CASE("3-D slice grids keep the fixed coordinate constant") {
  const fs::path dir = fresh_dir("slice");
  // small 3-D csv dataset
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  {
    std::ofstream csv(dir / "data3d.csv");
    csv << "a,b,c,y\n";
    for (int i = 0; i < 40; ++i) {
      const double a = unit(rng), b = unit(rng), c = unit(rng);
      csv << a << ',' << b << ',' << c << ',' << (a + 2.0 * b - c) << '\n';
    }
  }
  REQUIRE(run("fit --kernel stationary --dataset " + (dir / "data3d.csv").string() +
              " --dim 3 --seed 2 --iterations 6 --out " + dir.string()) == 0);
  REQUIRE(run("predict --model " + (dir / "model.json").string() +
              " --grid 0:1:5,0:1:5,0.5 --out " + dir.string()) == 0);
  const auto lines = read_lines(dir / "predictions.csv");
  REQUIRE(lines.size() == 26);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string f1, f2, f3;
    std::getline(ss, f1, ',');
    std::getline(ss, f2, ',');
    std::getline(ss, f3, ',');
    CHECK(std::stod(f3) == 0.5);
  }
}

TEST_CASE("dimension mismatch between model and queries exits with 3") {
  const fs::path dir = fresh_dir("mismatch");
  REQUIRE(run("fit --kernel stationary --dataset synth --n-points 12 --seed 1 "
              "--iterations 5 --out " + dir.string()) == 0);
  CHECK(run("predict --model " + (dir / "model.json").string() +
            " --grid 0:1:5,0:1:5 --out " + dir.string()) == 3);
}

TEST_CASE("compare emits a table over kernels and is seed-stable") {
  const fs::path dir = fresh_dir("compare");
  const std::string args =
      "compare --kernel stationary --kernel rbf --dataset synth --n-points 20 "
      "--seed 12 --iterations 6 --out ";
  REQUIRE(run(args + dir.string()) == 0);
  const json table = read_json(dir / "comparison.json");
  REQUIRE(table.at("results").size() == 2);
  CHECK(table.at("results").at(0).at("status") == "ok");
  CHECK(fs::exists(dir / "model_stationary.json"));
  CHECK(fs::exists(dir / "trace_rbf.csv"));
  const auto csv = read_lines(dir / "comparison.csv");
  CHECK(csv[0] == "kernel,rmse,crps,log_likelihood,wall_seconds,hyper_count,status");
  REQUIRE(csv.size() == 3);

  const fs::path dir2 = fresh_dir("compare2");
  REQUIRE(run(args + dir2.string()) == 0);
  const json again = read_json(dir2 / "comparison.json");
  for (int k = 0; k < 2; ++k) {
    CHECK(table.at("results").at(k).at("rmse").get<double>() ==
          again.at("results").at(k).at("rmse").get<double>());
    CHECK(table.at("results").at(k).at("log_likelihood").get<double>() ==
          again.at("results").at(k).at("log_likelihood").get<double>());
  }
}

TEST_CASE("measure writes the report and scatter files") {
  const fs::path dir = fresh_dir("measure");
  REQUIRE(run("measure --dataset synth-linear --n-points 80 --noise 1e-4 --seed 4 "
              "--m-iterations 1 --subset-size 10 --mcmc-iterations 300 --out " +
              dir.string()) == 0);
  const json report = read_json(dir / "measure.json");
  CHECK(report.at("signal_variance").at("means").size() == 1);
  CHECK(report.at("m_iterations") == 1);
  const auto scatter = read_lines(dir / "measure_scatter.csv");
  REQUIRE(scatter.size() == 2);
  CHECK(scatter[0] == "iteration,signal_variance_mean,length_scale_mean");
}

TEST_CASE("config files feed defaults and explicit flags win") {
  const fs::path dir = fresh_dir("config");
  {
    std::ofstream cfg(dir / "run.toml");
    cfg << "[synth]\nseed=9\nn-points=4\n";
  }
  REQUIRE(run("--config " + (dir / "run.toml").string() + " synth --out " +
              dir.string()) == 0);
  CHECK(read_lines(dir / "dataset.csv").size() == 5);  // header + 4 rows

  const fs::path dir2 = fresh_dir("config2");
  REQUIRE(run("--config " + (dir / "run.toml").string() +
              " synth --n-points 2 --out " + dir2.string()) == 0);
  CHECK(read_lines(dir2 / "dataset.csv").size() == 3);  // flag beats config

  CHECK(run("--config /no/such/config.toml synth --out " + dir.string()) == 2);
}

TEST_CASE("the NSGP_OUT environment variable supplies the output directory") {
  const fs::path dir = fresh_dir("envout");
  const std::string cmd = "NSGP_OUT=" + dir.string() + " " + kCli +
                          " synth --dataset synth --n-points 5 --seed 1 > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "dataset.csv"));
}
