#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "nflab/rational.hpp"

using namespace nflab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / "nflab_cli_tests" / tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_bijective_class(const fs::path& dir) {
  const fs::path file = dir / "bijective.cls";
  std::ofstream out(file);
  out << "space=3 alphabet=4\n1,2,3\n";
  return file;
}

}  // namespace

TEST_CASE("verify p_ratio emits the exact 2/5 row") {
  const auto dir = fresh_dir("p_ratio");
  const int status = cli::run({"verify", "p_ratio", "--space", "4", "--lambda-j", "2", "--r",
                               "2", "--seed", "7", "--out", dir.string()});
  CHECK(status == 0);
  const std::string csv = slurp(dir / "verify_p_ratio.csv");
  CHECK(csv.find("4,2,2,2,5,") != std::string::npos);
  CHECK(csv.find("# master_seed=7") != std::string::npos);
  CHECK(csv.find("# config_digest=") != std::string::npos);
}

TEST_CASE("verify rejects unknown suites with a usage error") {
  CHECK(cli::run({"verify", "no_such_suite", "--seed", "1"}) == 2);
}

TEST_CASE("the master seed is mandatory") {
  CHECK(cli::run({"verify", "p_ratio", "--space", "4", "--lambda-j", "2", "--r", "2"}) == 2);
}

TEST_CASE("verify dominance passes on a small randomized battery") {
  const auto dir = fresh_dir("dominance");
  CHECK(cli::run({"verify", "dominance", "--space", "3", "--alphabet", "2", "--instances", "5",
                  "--seed", "21", "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "verify_dominance.csv"));
  CHECK_FALSE(fs::exists(dir / "failures.json"));
}

TEST_CASE("bench reproduces the -2/9 delta anchor and writes plot data") {
  const auto dir = fresh_dir("bench");
  const auto class_file = write_bijective_class(dir);
  CHECK(cli::run({"bench", "--class", class_file.string(), "--algo", "random_replacement",
                  "--budget", "2", "--seed", "9", "--out", dir.string()}) == 0);
  const std::string delta = slurp(dir / "bench_delta_random_replacement_best_so_far.csv");
  CHECK(delta.find("2,-2,9\n") != std::string::npos);
  const std::string plot = slurp(dir / "plot_best_so_far.csv");
  CHECK(plot.find("t,random_enum,random_replacement\n") != std::string::npos);
}

TEST_CASE("bench without algorithms is a baseline-only report") {
  const auto dir = fresh_dir("bench_baseline");
  const auto class_file = write_bijective_class(dir);
  CHECK(cli::run({"bench", "--class", class_file.string(), "--budget", "3", "--seed", "4",
                  "--out", dir.string()}) == 0);
  CHECK(fs::exists(dir / "bench_expectation_baseline_best_so_far.csv"));
  const std::string plot = slurp(dir / "plot_best_so_far.csv");
  CHECK(plot.find("t,random_enum\n") != std::string::npos);
}

TEST_CASE("bench surfaces config problems as usage errors") {
  const auto dir = fresh_dir("bench_errors");
  const auto class_file = write_bijective_class(dir);
  CHECK(cli::run({"bench", "--seed", "1", "--out", dir.string()}) == 2);  // no class
  CHECK(cli::run({"bench", "--class", class_file.string(), "--algo", "gradient_descent",
                  "--seed", "1", "--out", dir.string()}) == 2);
  CHECK(cli::run({"bench", "--class", (dir / "missing.cls").string(), "--seed", "1", "--out",
                  dir.string()}) == 2);
  CHECK(cli::run({"bench", "--class", class_file.string(), "--mode", "mc:0", "--seed", "1",
                  "--out", dir.string()}) == 2);
  // exact mode needs a decision model small enough to enumerate
  const fs::path wide = dir / "wide.cls";
  {
    std::ofstream out(wide);
    out << "space=65 alphabet=2\n";
    for (int f = 0; f < 2; ++f) {
      for (int i = 0; i < 65; ++i) out << (i ? "," : "") << (i == f ? 1 : 0);
      out << "\n";
    }
  }
  CHECK(cli::run({"bench", "--class", wide.string(), "--algo", "random_enum", "--seed", "1",
                  "--out", dir.string()}) == 2);
}

TEST_CASE("game validates its class pair") {
  const auto dir = fresh_dir("game_errors");
  const fs::path psi = dir / "psi.cls";
  {
    std::ofstream out(psi);
    out << "space=3 alphabet=3\n2,0,1\n2,1,0\n";
  }
  CHECK(cli::run({"game", "--class", psi.string(), "--algo", "random_enum", "--seed", "1",
                  "--out", dir.string()}) == 2);
  CHECK(cli::run({"game", "--class", psi.string(), "--class", psi.string(), "--algo",
                  "random_enum", "--seed", "1", "--out", dir.string()}) == 2);
}

TEST_CASE("game reports zero deviation for the enumeration baseline") {
  const auto dir = fresh_dir("game_enum");
  const fs::path psi = dir / "psi.cls";
  const fs::path phi = dir / "phi.cls";
  {
    std::ofstream out(psi);
    out << "space=3 alphabet=3\n2,0,1\n2,1,0\n";
    std::ofstream out2(phi);
    out2 << "space=3 alphabet=3\n0,1,2\n0,2,1\n1,0,2\n1,2,0\n";
  }
  CHECK(cli::run({"game", "--class", psi.string(), "--class", phi.string(), "--algo",
                  "random_enum", "--budget", "4", "--seed", "3", "--out", dir.string()}) == 0);
  const std::string unseen = slurp(dir / "game_unseen_random_enum_best_so_far.csv");
  std::istringstream lines(unseen);
  std::string line;
  bool header_passed = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_passed) {
      header_passed = true;
      continue;
    }
    // delta_num is the sixth column
    std::stringstream ss(line);
    std::string field;
    for (int i = 0; i < 6; ++i) std::getline(ss, field, ',');
    CHECK(field == "0");
  }
  CHECK(fs::exists(dir / "game_training_random_enum_best_so_far.csv"));
}

TEST_CASE("game runs in monte carlo mode without exact assertions") {
  const auto dir = fresh_dir("game_mc");
  const fs::path psi = dir / "psi.cls";
  const fs::path phi = dir / "phi.cls";
  {
    std::ofstream out(psi);
    out << "space=3 alphabet=3\n2,0,1\n2,1,0\n";
    std::ofstream out2(phi);
    out2 << "space=3 alphabet=3\n0,1,2\n0,2,1\n1,0,2\n1,2,0\n";
  }
  CHECK(cli::run({"game", "--class", psi.string(), "--class", phi.string(), "--algo",
                  "random_replacement", "--mode", "mc:2000", "--budget", "4", "--seed", "8",
                  "--out", dir.string()}) == 0);
  const std::string unseen = slurp(dir / "game_unseen_random_replacement_best_so_far.csv");
  CHECK(unseen.find("t,algo_mean,enum_mean,delta_mean,") != std::string::npos);
}

TEST_CASE("config files mirror the flags") {
  const auto dir = fresh_dir("config");
  const fs::path config = dir / "run.conf";
  {
    std::ofstream out(config);
    out << "# p-ratio single point\nspace=4\nlambda-j=2\nr=2\nseed=7\nout=" << dir.string()
        << "\n";
  }
  CHECK(cli::run({"verify", "p_ratio", "--config", config.string()}) == 0);
  CHECK(slurp(dir / "verify_p_ratio.csv").find("4,2,2,2,5,") != std::string::npos);

  // later command-line flags override config values
  const auto dir2 = fresh_dir("config_override");
  CHECK(cli::run({"verify", "p_ratio", "--config", config.string(), "--r", "0", "--out",
                  dir2.string()}) == 0);
  CHECK(slurp(dir2 / "verify_p_ratio.csv").find("4,2,0,1,1,") != std::string::npos);

  const fs::path bad = dir / "bad.conf";
  {
    std::ofstream out(bad);
    out << "this line has no equals sign\n";
  }
  CHECK(cli::run({"verify", "p_ratio", "--config", bad.string()}) == 2);
}

TEST_CASE("identical invocations produce byte-identical reports") {
  const auto dir_a = fresh_dir("repro_a");
  const auto dir_b = fresh_dir("repro_b");
  const auto class_file = write_bijective_class(dir_a);
  const std::vector<std::string> base = {"bench",  "--class", class_file.string(),
                                         "--algo", "random_replacement", "--mode", "mc:4096",
                                         "--budget", "4", "--seed", "11"};
  auto a = base;
  a.insert(a.end(), {"--out", dir_a.string(), "--threads", "1"});
  auto b = base;
  b.insert(b.end(), {"--out", dir_b.string(), "--threads", "3"});
  REQUIRE(cli::run(a) == 0);
  REQUIRE(cli::run(b) == 0);
  for (const auto& entry : fs::directory_iterator(dir_b)) {
    if (entry.path().extension() != ".csv") continue;
    CHECK(slurp(dir_a / entry.path().filename()) == slurp(entry.path()));
  }
}

TEST_CASE("the installed binary behaves like the library entry point") {
  const std::string binary = NFLAB_CLI_BINARY;
  CHECK(std::system((binary + " --help > /dev/null").c_str()) == 0);
  const auto dir = fresh_dir("subprocess");
  const std::string command = binary + " verify p_ratio --space 4 --lambda-j 2 --r 2 --seed 7 --out " +
                              dir.string() + " > /dev/null";
  CHECK(std::system(command.c_str()) == 0);
  CHECK(fs::exists(dir / "verify_p_ratio.csv"));
  const std::string bad = binary + " verify bogus --seed 1 2> /dev/null";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
