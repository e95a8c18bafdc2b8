#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "ocdeepiv/commands.hpp"
#include "ocdeepiv/csv.hpp"

using namespace ocdeepiv;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "ocdeepiv_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OCDEEPIV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config defaults") {
  ExperimentConfig cfg = ExperimentConfig::parse_text("", "inline");
  CHECK(cfg.dgp_kind == DgpKind::CodeFaithful);
  CHECK(cfg.dgp.n == 10000);
  CHECK(cfg.train.epochs == 100);
  CHECK(cfg.train.switch_epoch == 50);
  CHECK(cfg.train.lr == 1e-3);
  CHECK(cfg.train.weight_decay == 5e-4);
  CHECK(cfg.train.lambda_reg == 0.02);
  CHECK(cfg.train.dropout_p == 0.3);
  CHECK(cfg.smoothing_window == 15);
  CHECK(cfg.replications == 1);
  CHECK(cfg.plot == false);
  REQUIRE(cfg.estimators.size() == 1);
  CHECK(cfg.estimators[0] == EstimatorKind::OCDeepIV_CodeFaithful);
}

TEST_CASE("config parsing sections, comments, and lists") {
  const std::string text =
      "# experiment\n"
      "[dgp]\n"
      "kind = logistic_confounded\n"
      "n = 500\n"
      "seed = 9\n"
      "kappa_t = 0.5\n"
      "constant_effect = 1.5\n"
      "\n"
      "[train]\n"
      "epochs = 20\n"
      "switch_epoch = 10\n"
      "lambda = 0.05\n"
      "\n"
      "[run]\n"
      "estimators = NaiveOLS, TwoSLS,LinearDML\n"
      "smoothing_window = 7\n"
      "plot = true\n"
      "theta_mode = two_stage\n";
  ExperimentConfig cfg = ExperimentConfig::parse_text(text, "inline");
  CHECK(cfg.dgp_kind == DgpKind::LogisticConfounded);
  CHECK(cfg.dgp.n == 500);
  CHECK(cfg.dgp.seed == 9);
  CHECK(cfg.dgp.kappa_t == 0.5);
  REQUIRE(cfg.dgp.constant_effect.has_value());
  CHECK(*cfg.dgp.constant_effect == 1.5);
  CHECK(cfg.train.epochs == 20);
  CHECK(cfg.train.lambda_reg == 0.05);
  REQUIRE(cfg.estimators.size() == 3);
  CHECK(cfg.estimators[1] == EstimatorKind::TwoSLS);
  CHECK(cfg.smoothing_window == 7);
  CHECK(cfg.plot);
  CHECK(cfg.theta_mode == ThetaMode::TwoStage);
}

TEST_CASE("config errors carry the line number") {
  try {
    ExperimentConfig::parse_text("[dgp]\nn = 10\nbogus = 1\n", "cfg.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cfg.ini:3") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(ExperimentConfig::parse_text("[what]\n", "x"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text("[train]\nepochs = ten\n", "x"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text("[run]\nestimators = Fancy\n", "x"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text("[dgp]\nn = 1\n", "x"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text("noeq\n", "x"), ConfigError);
}

TEST_CASE("format_double round-trips through parse") {
  const double values[] = {0.0,   1.0,    -1.5,        0.1,  1e-300,
                           1e300, 1.0 / 3.0, 0.060475, -2.5e-17};
  for (double v : values) {
    const std::string s = format_double(v);
    CHECK(parse_field(s, "mem", 1) == v);
  }
}

TEST_CASE("csv read round-trip and errors") {
  fs::path dir = scratch_dir("csv");
  write_file(dir / "t.csv", "a,b\n1,2\n0.5,-3\n");
  CsvTable t = read_csv((dir / "t.csv").string());
  REQUIRE(t.header.size() == 2);
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), ConfigError);
  REQUIRE(t.rows.size() == 2);
  CHECK(parse_field(t.rows[1][0], "t.csv", 2) == 0.5);

  write_file(dir / "ragged.csv", "a,b\n1\n");
  try {
    read_csv((dir / "ragged.csv").string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(read_csv((dir / "missing.csv").string()), ConfigError);
  CHECK_THROWS_AS(parse_field("abc", "t.csv", 3), ConfigError);
}

TEST_CASE("run_simulate writes the dataset and manifest") {
  fs::path dir = scratch_dir("simulate");
  ExperimentConfig cfg = ExperimentConfig::parse_text(
      "[dgp]\nkind = logistic_confounded\nn = 25\nseed = 4\n", "inline");
  run_simulate(cfg, dir.string());

  CsvTable t = read_csv((dir / "dataset.csv").string());
  CHECK(t.rows.size() == 25);
  CHECK(t.column("z1") == 0);
  CHECK(t.column("t") == 5);
  CHECK(t.column("y") == 6);
  CHECK(t.column("theta_true") == 7);

  const std::string manifest = read_file(dir / "manifest.txt");
  CHECK(manifest.find("dgp.n=25") != std::string::npos);
  CHECK(manifest.find("file.dataset.csv.digest=") != std::string::npos);

  // no y column for the unconfounded generator
  ExperimentConfig cf = ExperimentConfig::parse_text("[dgp]\nn = 10\n", "inline");
  fs::path dir2 = scratch_dir("simulate2");
  run_simulate(cf, dir2.string());
  CsvTable t2 = read_csv((dir2 / "dataset.csv").string());
  CHECK(t2.header.size() == 7);
  CHECK_THROWS_AS(t2.column("y"), ConfigError);
}

TEST_CASE("run_train writes losses and theta with the staged schedule") {
  fs::path dir = scratch_dir("train");
  ExperimentConfig cfg = ExperimentConfig::parse_text(
      "[dgp]\nn = 200\n[train]\nepochs = 6\nswitch_epoch = 3\n"
      "[run]\nsmoothing_window = 5\n",
      "inline");
  run_train(cfg, dir.string());

  CsvTable losses = read_csv((dir / "losses.csv").string());
  REQUIRE(losses.rows.size() == 6);
  const std::size_t oc = losses.column("ortho");
  for (std::size_t i = 0; i < 3; ++i) CHECK(losses.rows[i][oc].empty());
  for (std::size_t i = 3; i < 6; ++i) {
    CHECK(!losses.rows[i][oc].empty());
    CHECK(parse_field(losses.rows[i][oc], "losses.csv", i + 2) > 0.0);
  }

  CsvTable theta = read_csv((dir / "theta.csv").string());
  REQUIRE(theta.rows.size() == 200);
  CHECK(theta.column("theta_smooth") == 3);
}

TEST_CASE("cli exit codes") {
  fs::path dir = scratch_dir("cli");
  write_file(dir / "good.ini", "[dgp]\nn = 30\n[train]\nepochs = 1\nswitch_epoch = 1\n");
  write_file(dir / "bad.ini", "[dgp]\nwhoops = 1\n");

  CHECK(run_cli("simulate --config " + (dir / "good.ini").string() + " --out " +
                (dir / "o1").string()) == 0);
  CHECK(fs::exists(dir / "o1" / "dataset.csv"));

  CHECK(run_cli("train --config " + (dir / "good.ini").string() + " --out " +
                (dir / "o2").string()) == 0);
  CHECK(fs::exists(dir / "o2" / "losses.csv"));
  CsvTable losses = read_csv((dir / "o2" / "losses.csv").string());
  CHECK(losses.rows.size() == 1);

  CHECK(run_cli("simulate --config " + (dir / "bad.ini").string()) == 1);
  CHECK(run_cli("simulate --config " + (dir / "missing.ini").string()) == 1);
  CHECK(run_cli("gradcheck --scope mse") == 0);
  CHECK(run_cli("gradcheck --scope nothing") == 1);
}

TEST_CASE("cli seed flag overrides the config seeds") {
  fs::path dir = scratch_dir("seed");
  write_file(dir / "c.ini", "[dgp]\nn = 40\nseed = 1\n");
  REQUIRE(run_cli("simulate --config " + (dir / "c.ini").string() + " --seed 2 --out " +
                  (dir / "a").string()) == 0);
  write_file(dir / "c2.ini", "[dgp]\nn = 40\nseed = 2\n");
  REQUIRE(run_cli("simulate --config " + (dir / "c2.ini").string() + " --out " +
                  (dir / "b").string()) == 0);
  CsvTable a = read_csv((dir / "a" / "dataset.csv").string());
  CsvTable b = read_csv((dir / "b" / "dataset.csv").string());
  CHECK(a.rows == b.rows);
}

TEST_CASE("run_plot renders both figures") {
  fs::path dir = scratch_dir("plot");
  ExperimentConfig cfg = ExperimentConfig::parse_text(
      "[dgp]\nn = 120\n[train]\nepochs = 4\nswitch_epoch = 2\n", "inline");
  run_train(cfg, dir.string());
  run_plot((dir / "theta.csv").string(), (dir / "losses.csv").string(), dir.string());

  const std::string theta_svg = read_file(dir / "theta_plot.svg");
  const std::string losses_svg = read_file(dir / "losses_plot.svg");
  CHECK(theta_svg.find("<svg") != std::string::npos);
  CHECK(losses_svg.find("<svg") != std::string::npos);
  CHECK(losses_svg.find("dash") != std::string::npos);  // stage-switch marker

  // identical inputs give identical bytes
  fs::path dir2 = scratch_dir("plot2");
  run_train(cfg, dir2.string());
  run_plot((dir2 / "theta.csv").string(), (dir2 / "losses.csv").string(), dir2.string());
  CHECK(read_file(dir2 / "theta_plot.svg") == theta_svg);
  CHECK(read_file(dir2 / "losses_plot.svg") == losses_svg);
}

TEST_CASE("run_compare writes one row per estimator") {
  fs::path dir = scratch_dir("compare");
  ExperimentConfig cfg = ExperimentConfig::parse_text(
      "[dgp]\nkind = logistic_confounded\nn = 400\n"
      "[train]\nepochs = 2\nswitch_epoch = 1\n"
      "[run]\nestimators = NaiveOLS,TwoSLS\nreplications = 2\n",
      "inline");
  run_compare(cfg, dir.string());
  CsvTable t = read_csv((dir / "comparison.csv").string());
  REQUIRE(t.rows.size() == 2);
  const std::size_t kc = t.column("kind"), sc = t.column("status");
  CHECK(t.rows[0][kc] == "NaiveOLS");
  CHECK(t.rows[0][sc] == "ok");
  CHECK(t.rows[1][kc] == "TwoSLS");
  CHECK(parse_field(t.rows[0][t.column("mse_raw")], "comparison.csv", 1) > 0.0);
}
