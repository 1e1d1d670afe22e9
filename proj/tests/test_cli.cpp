#include <doctest.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

// End-to-end checks against the installed binary.

#ifndef BOOSTR_CLI_PATH
#define BOOSTR_CLI_PATH "./boostr"
#endif

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("boostr_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BOOSTR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("simulate / train / predict round trip through files") {
  TempDir dir;
  REQUIRE(run_cli("simulate --dataset A --n 60 --seed 5 --out-dir " + dir.path.string()) == 0);
  REQUIRE(fs::exists(dir.file("events.csv")));
  REQUIRE(fs::exists(dir.file("static.csv")));

  const std::string base = " --events " + dir.file("events.csv") + " --static " + dir.file("static.csv");
  REQUIRE(run_cli("train" + base + " --K 5 --gamma1 100 --gamma2 50 --d-max 4 --seed 5 --out " + dir.file("m.json") +
                  " --loss-trace " + dir.file("loss.csv") + " --leaves " + dir.file("leaves.csv")) == 0);
  REQUIRE(fs::exists(dir.file("m.json")));
  CHECK(slurp(dir.file("loss.csv")).starts_with("k,loss"));
  CHECK(slurp(dir.file("leaves.csv")).starts_with("k,leaves"));

  REQUIRE(run_cli("predict --model " + dir.file("m.json") + base + " --out " + dir.file("curves.csv")) == 0);
  CHECK(slurp(dir.file("curves.csv")).starts_with("id,t,value,masked"));

  // Persisted and freshly trained models must predict identically:
  // retrain into a second file and compare bytes.
  REQUIRE(run_cli("train" + base + " --K 5 --gamma1 100 --gamma2 50 --d-max 4 --seed 5 --out " + dir.file("m2.json")) ==
          0);
  CHECK(slurp(dir.file("m.json")) == slurp(dir.file("m2.json")));

  REQUIRE(run_cli("importance --model " + dir.file("m.json") + " --out " + dir.file("imp.csv")) == 0);
  CHECK(slurp(dir.file("imp.csv")).starts_with("feature,raw,standardized"));

  REQUIRE(run_cli("export partition --model " + dir.file("m.json") + " --out " + dir.file("part.csv")) == 0);
  CHECK(slurp(dir.file("part.csv")).starts_with("tree,leaf,feature,lo,hi"));
  REQUIRE(run_cli("export leaf-curves --model " + dir.file("m.json") + " --out " + dir.file("lc.csv")) == 0);
  CHECK(slurp(dir.file("lc.csv")).starts_with("tree,leaf,t,value"));
}

TEST_CASE("validation failures exit with status 1 and a single-line reason") {
  TempDir dir;
  CHECK(run_cli("train --events missing.csv --static missing.csv --out " + dir.file("m.json")) == 1);
  CHECK(run_cli("simulate --dataset Z --out-dir " + dir.path.string()) == 1);
  CHECK(run_cli("nonsense") == 1);

  // Malformed input names the offending line on stderr.
  {
    std::ofstream st(dir.file("static.csv"));
    st << "id,x1\nA,0.5\n";
    std::ofstream ev(dir.file("events.csv"));
    ev << "id,time,kind\nA,150,event\nA,120,censor\n";
  }
  const std::string cmd = std::string(BOOSTR_CLI_PATH) + " train --events " + dir.file("events.csv") + " --static " +
                          dir.file("static.csv") + " --out " + dir.file("m.json") + " 2>" + dir.file("err.txt");
  const int status = WEXITSTATUS(std::system(cmd.c_str()));
  CHECK(status == 1);
  const std::string err = slurp(dir.file("err.txt"));
  CHECK(err.starts_with("error: "));
  CHECK(err.find(":2:") != std::string::npos);
  CHECK(std::count(err.begin(), err.end(), '\n') == 1);
}

TEST_CASE("numeric failures exit with status 2") {
  TempDir dir;
  // Every individual has identical observed counts, so the concordance
  // index has no valid pair.
  {
    std::ofstream st(dir.file("static.csv"));
    st << "id,x1\n";
    for (int i = 0; i < 12; ++i) st << "w" << i << "," << 0.1 * i << "\n";
    std::ofstream ev(dir.file("events.csv"));
    ev << "id,time,kind\n";
    for (int i = 0; i < 12; ++i) ev << "w" << i << ",100,censor\n";
  }
  CHECK(run_cli("evaluate --events " + dir.file("events.csv") + " --static " + dir.file("static.csv") +
                " --method mcf --reps 2 --train-size 8 --test-size 4") == 2);
}

TEST_CASE("config file supplies defaults, flags win") {
  TempDir dir;
  REQUIRE(run_cli("simulate --dataset A --n 40 --seed 6 --out-dir " + dir.path.string()) == 0);
  {
    std::ofstream cfg(dir.file("run.cfg"));
    cfg << "K=3\ngamma1=100\ngamma2=50\n";
  }
  const std::string base = " --events " + dir.file("events.csv") + " --static " + dir.file("static.csv");
  REQUIRE(run_cli("train" + base + " --config " + dir.file("run.cfg") + " --seed 6 --out " + dir.file("a.json")) == 0);
  REQUIRE(run_cli("train" + base + " --config " + dir.file("run.cfg") + " --seed 6 --K 4 --out " + dir.file("b.json")) ==
          0);
  CHECK(slurp(dir.file("a.json")).find("\"K\": 3") != std::string::npos);
  CHECK(slurp(dir.file("b.json")).find("\"K\": 4") != std::string::npos);  // flag beats config
}

TEST_CASE("BOOSTR_SEED environment variable is the fallback seed") {
  TempDir dir;
  const std::string out = dir.path.string();
  const std::string cmd = "BOOSTR_SEED=123 " + std::string(BOOSTR_CLI_PATH) + " simulate --dataset A --n 10 --out-dir ";
  REQUIRE(WEXITSTATUS(std::system((cmd + dir.file("e1") + " >/dev/null 2>&1").c_str())) == 0);
  REQUIRE(run_cli("simulate --dataset A --n 10 --seed 123 --out-dir " + dir.file("e2")) == 0);
  CHECK(slurp(dir.file("e1") + "/events.csv") == slurp(dir.file("e2") + "/events.csv"));
}

TEST_CASE("evaluate writes per-rep CSV and JSON summary") {
  TempDir dir;
  REQUIRE(run_cli("simulate --dataset A --n 80 --seed 8 --out-dir " + dir.path.string()) == 0);
  const std::string base = " --events " + dir.file("events.csv") + " --static " + dir.file("static.csv");
  REQUIRE(run_cli("evaluate" + base + " --method mcf --reps 3 --train-size 60 --test-size 20 --seed 8 --out-prefix " +
                  dir.file("eval")) == 0);
  CHECK(slurp(dir.file("eval_reps.csv")).starts_with("rep,c_index,l2,mse"));
  CHECK(slurp(dir.file("eval_summary.json")).find("\"method\": \"mcf\"") != std::string::npos);
}

TEST_CASE("tune writes the leaves-per-run report") {
  TempDir dir;
  REQUIRE(run_cli("simulate --dataset A --n 60 --seed 9 --out-dir " + dir.path.string()) == 0);
  const std::string base = " --events " + dir.file("events.csv") + " --static " + dir.file("static.csv");
  REQUIRE(run_cli("tune" + base + " --runs 4 --K 3 --seed 9 --out " + dir.file("tune.csv")) == 0);
  const std::string report = slurp(dir.file("tune.csv"));
  CHECK(report.starts_with("run,gamma1,gamma2,leaves_min"));
  CHECK(std::count(report.begin(), report.end(), '\n') == 5);  // header + 4 runs
}
