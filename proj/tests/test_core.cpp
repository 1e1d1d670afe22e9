#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "boostr/core.hpp"
#include "boostr/io.hpp"

using namespace boostr;

namespace {

Curve constant_curve(const TimeGrid& grid, double value, int n_obs = -1) {
  return Curve{grid, ArrayXd::Constant(grid.m, value), n_obs < 0 ? grid.m : n_obs};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("boostr_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("build_grid basics") {
  const TimeGrid g = build_grid(100, 4);
  CHECK(g.delta() == 25.0);
  CHECK(g.t(0) == 25.0);
  CHECK(g.t(3) == 100.0);

  const TimeGrid g2 = build_grid(1, 2);
  CHECK(g2.t(0) == 0.5);
  CHECK(g2.t(1) == 1.0);

  const TimeGrid g3 = build_grid(120, 120);
  CHECK(g3.delta() == 1.0);
  CHECK(g3.m == 120);

  CHECK_THROWS_AS(build_grid(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(-1, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(10, 1), std::invalid_argument);
}

TEST_CASE("grid endpoint lands exactly on t_max") {
  // 100/3 is not representable; the endpoint formula must still close the grid.
  const TimeGrid g = build_grid(100, 3);
  CHECK(g.t(2) == 100.0);
}

TEST_CASE("empirical_mcf counting and censoring") {
  const TimeGrid g = build_grid(100, 4);

  Curve c = empirical_mcf(EventHistory{{}, 100.0}, g);
  CHECK(c.values.isZero());
  CHECK(c.n_obs == 4);

  // Counts of events in (0, t_j] on grid points {25, 50, 75, 100}.
  c = empirical_mcf(EventHistory{{30.0, 60.0}, 100.0}, g);
  CHECK(c.values[0] == 0);
  CHECK(c.values[1] == 1);
  CHECK(c.values[2] == 2);
  CHECK(c.values[3] == 2);

  c = empirical_mcf(EventHistory{{30.0}, 50.0}, g);
  CHECK(c.n_obs == 2);
  CHECK(c.values[0] == 0);
  CHECK(c.values[1] == 1);
  CHECK(c.values[2] == 1);  // held constant, masked out
  CHECK(c.values[3] == 1);
  CHECK(!c.observed(2));
}

TEST_CASE("empirical_mcf is a non-decreasing count of (0, t_j]") {
  const TimeGrid g = build_grid(10, 20);
  const Curve c = empirical_mcf(EventHistory{{0.5, 1.75, 3.0, 9.99}, 10.0}, g);
  for (int j = 1; j < g.m; ++j) CHECK(c.values[j] >= c.values[j - 1]);
  CHECK(c.values[0] == 1);  // t_1 = 0.5, one event at exactly 0.5
  CHECK(c.values[19] == 4);
}

TEST_CASE("event history invariants") {
  CHECK_THROWS(EventHistory{{2.0, 1.0}, 10.0}.validate());  // unsorted
  CHECK_THROWS(EventHistory{{1.0, 1.0}, 10.0}.validate());  // duplicate
  CHECK_THROWS(EventHistory{{11.0}, 10.0}.validate());      // beyond censor
  CHECK_THROWS(EventHistory{{}, 0.0}.validate());           // bad censor
  CHECK_NOTHROW(EventHistory{{1.0, 10.0}, 10.0}.validate());
}

TEST_CASE("curve_integral unit square") {
  const TimeGrid g = build_grid(1, 2);
  CHECK(curve_integral(constant_curve(g, 1.0), constant_curve(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("curve_integral zero annihilates") {
  const TimeGrid g = build_grid(5, 17);
  Curve b{g, ArrayXd::Random(g.m), g.m};
  CHECK(curve_integral(constant_curve(g, 0.0), b) == 0.0);
}

TEST_CASE("curve_integral linear ramp") {
  const TimeGrid g = build_grid(1, 100);
  Curve ramp{g, ArrayXd::Zero(g.m), g.m};
  for (int j = 0; j < g.m; ++j) ramp.values[j] = g.t(j);
  CHECK(curve_integral(ramp, constant_curve(g, 1.0)) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("curve_integral respects the mask intersection") {
  const TimeGrid g = build_grid(10, 10);
  const Curve a = constant_curve(g, 1.0, 5);
  const Curve b = constant_curve(g, 1.0, 8);
  CHECK(curve_integral(a, b) == doctest::Approx(5.0));  // integrates (0, 5]
}

TEST_CASE("curve_integral grid mismatch") {
  const Curve a = constant_curve(build_grid(1, 4), 1.0);
  const Curve b = constant_curve(build_grid(1, 5), 1.0);
  CHECK_THROWS_AS(curve_integral(a, b), std::invalid_argument);
}

TEST_CASE("curve_integral is symmetric and bilinear") {
  const TimeGrid g = build_grid(3, 37);
  const Curve a{g, ArrayXd::Random(g.m), g.m};
  const Curve b{g, ArrayXd::Random(g.m), g.m};
  const Curve c{g, ArrayXd::Random(g.m), g.m};
  CHECK(curve_integral(a, b) == doctest::Approx(curve_integral(b, a)).epsilon(1e-14));
  const Curve apb{g, 2.0 * a.values + 3.0 * b.values, g.m};
  CHECK(curve_integral(apb, c) ==
        doctest::Approx(2.0 * curve_integral(a, c) + 3.0 * curve_integral(b, c)).epsilon(1e-12));
}

TEST_CASE("curve_integral refinement converges monotonically on polynomials") {
  // Integrand t^2 over (0, 1]: closed form 1/3.
  double prev_err = 1e9;
  for (int m : {8, 16, 32, 64, 128}) {
    const TimeGrid g = build_grid(1, m);
    Curve sq{g, ArrayXd::Zero(m), m};
    for (int j = 0; j < m; ++j) sq.values[j] = g.t(j) * g.t(j);
    const double err = std::abs(curve_integral(sq, constant_curve(g, 1.0)) - 1.0 / 3.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-4);
}

TEST_CASE("dataset round-trip is exact") {
  Dataset data;
  data.p = 2;
  data.q = 1;
  data.grid = build_grid(100, 10);
  for (int i = 0; i < 3; ++i) {
    Individual ind;
    ind.id = "unit-" + std::to_string(i);
    ind.x.resize(2);
    ind.x << 0.1 * i + 0.0314159, 1.0 / 3.0 + i;
    ind.events.censor = 100.0 - i * 0.25;
    if (i > 0) ind.events.times = {1.0 / 7.0, 50.0 + 1e-13};
    DynamicSeries s;
    s.times = {0.0, 10.0 / 3.0};
    s.values = {-1.5, 2.25e-7};
    ind.z.push_back(s);
    data.individuals.push_back(ind);
  }

  TempDir dir;
  save_dataset(data, dir.file("events.csv"), dir.file("static.csv"), dir.file("dynamic.csv"));
  const Dataset loaded = load_dataset(dir.file("events.csv"), dir.file("static.csv"), dir.file("dynamic.csv"), 10);

  REQUIRE(loaded.size() == 3);
  CHECK(loaded.p == 2);
  CHECK(loaded.q == 1);
  for (int i = 0; i < 3; ++i) {
    CHECK(loaded.individuals[i].id == data.individuals[i].id);
    CHECK(loaded.individuals[i].x == data.individuals[i].x);
    CHECK(loaded.individuals[i].events.censor == data.individuals[i].events.censor);
    CHECK(loaded.individuals[i].events.times == data.individuals[i].events.times);
    CHECK(loaded.individuals[i].z[0].times == data.individuals[i].z[0].times);
    CHECK(loaded.individuals[i].z[0].values == data.individuals[i].z[0].values);
  }
}

TEST_CASE("loader rejects event after censor, naming the row") {
  TempDir dir;
  {
    std::ofstream st(dir.file("static.csv"));
    st << "id,x1\nA,0.5\n";
    std::ofstream ev(dir.file("events.csv"));
    ev << "id,time,kind\nA,150,event\nA,120,censor\n";
  }
  try {
    load_dataset(dir.file("events.csv"), dir.file("static.csv"));
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2:") != std::string::npos);  // the offending event row
    CHECK(msg.find("censor") != std::string::npos);
  }
}

TEST_CASE("loader rejects unsorted event times") {
  TempDir dir;
  {
    std::ofstream st(dir.file("static.csv"));
    st << "id,x1\nA,0.5\n";
    std::ofstream ev(dir.file("events.csv"));
    ev << "id,time,kind\nA,50,event\nA,20,event\nA,120,censor\n";
  }
  try {
    load_dataset(dir.file("events.csv"), dir.file("static.csv"));
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("loader rejects malformed numbers and missing censor rows") {
  TempDir dir;
  {
    std::ofstream st(dir.file("static.csv"));
    st << "id,x1\nA,zebra\n";
    std::ofstream ev(dir.file("events.csv"));
    ev << "id,time,kind\nA,120,censor\n";
  }
  CHECK_THROWS(load_dataset(dir.file("events.csv"), dir.file("static.csv")));
  {
    std::ofstream st(dir.file("static.csv"));
    st << "id,x1\nA,0.5\n";
    std::ofstream ev(dir.file("events.csv"));
    ev << "id,time,kind\nA,10,event\n";
  }
  CHECK_THROWS(load_dataset(dir.file("events.csv"), dir.file("static.csv")));
}

TEST_CASE("dynamic file omitted gives q = 0") {
  TempDir dir;
  {
    std::ofstream st(dir.file("static.csv"));
    st << "id,x1\nA,0.5\n";
    std::ofstream ev(dir.file("events.csv"));
    ev << "id,time,kind\nA,10,event\nA,120,censor\n";
  }
  const Dataset data = load_dataset(dir.file("events.csv"), dir.file("static.csv"));
  CHECK(data.q == 0);
  CHECK(data.grid.t_max == 120.0);
}

TEST_CASE("save_curves schema") {
  TempDir dir;
  const TimeGrid g = build_grid(2, 2);
  save_curves({{"w1", constant_curve(g, 1.25, 1)}}, dir.file("curves.csv"));
  std::ifstream in(dir.file("curves.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,t,value,masked");
  std::getline(in, line);
  CHECK(line == "w1,1,1.25,1");
  std::getline(in, line);
  CHECK(line == "w1,2,1.25,0");
}

TEST_CASE("zero-order-hold series lookup") {
  DynamicSeries s{{0.0, 2.0, 5.0}, {1.0, -1.0, 4.0}};
  CHECK(s.at(0.0) == 1.0);
  CHECK(s.at(1.999) == 1.0);
  CHECK(s.at(2.0) == -1.0);
  CHECK(s.at(4.9) == -1.0);
  CHECK(s.at(5.0) == 4.0);
  CHECK(s.at(100.0) == 4.0);  // last value held
}
