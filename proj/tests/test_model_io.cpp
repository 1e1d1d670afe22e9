#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "boostr/boost_dynamic.hpp"
#include "boostr/boost_static.hpp"
#include "boostr/model_io.hpp"
#include "boostr/rng.hpp"
#include "boostr/simulate.hpp"

using namespace boostr;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("boostr_mio_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

Dataset small_dynamic_dataset(int n, uint64_t seed) {
  Dataset data;
  data.p = 2;
  data.q = 1;
  data.grid = build_grid(10, 20);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, 3, i);
    Individual ind;
    ind.id = std::to_string(i + 1);
    ind.x.resize(2);
    ind.x << rng.uniform(), rng.uniform();
    DynamicSeries z;
    for (double t = 0.0; t < 10.0; t += 0.5) {
      z.times.push_back(t);
      z.values.push_back(rng.uniform());
    }
    ind.z.push_back(z);
    ind.events = sim_hpp(0.5 + ind.x[0], 10.0, rng);
    data.individuals.push_back(std::move(ind));
  }
  return data;
}

}  // namespace

TEST_CASE("static model save/load preserves predictions bit for bit") {
  const Dataset data = gen_dataset_a(60, 61);
  BoostConfig config;
  config.K = 8;
  config.gamma1 = 50.0;
  config.gamma2 = 50.0;
  const EnsembleStatic ens = fit_static(data, config);

  TempDir dir;
  save_model(ens, dir.file("model.json"));
  CHECK(model_version(dir.file("model.json")) == "boostr-static-v1");
  const EnsembleStatic loaded = load_static_model(dir.file("model.json"));

  CHECK(loaded.p == ens.p);
  CHECK(loaded.grid == ens.grid);
  CHECK(loaded.config.K == config.K);
  for (const auto& ind : data.individuals) {
    const Curve a = ens.predict(ind.x);
    const Curve b = loaded.predict(ind.x);
    CHECK((a.values == b.values).all());
  }
  CHECK((loaded.importance_raw.array() == ens.importance_raw.array()).all());

  // Serialization is a pure function of the model.
  CHECK(model_to_json(ens) == model_to_json(loaded));
}

TEST_CASE("dynamic model save/load preserves predictions bit for bit") {
  const Dataset data = small_dynamic_dataset(40, 62);
  BoostConfig config;
  config.K = 4;
  config.gamma1 = 1.0;
  config.gamma2 = 1.0;
  config.min_leaf = 8;
  const EnsembleDynamic ens = fit_dynamic(data, config, 2, 3);

  TempDir dir;
  save_model(ens, dir.file("model.json"));
  CHECK(model_version(dir.file("model.json")) == "boostr-dynamic-v1");
  const EnsembleDynamic loaded = load_dynamic_model(dir.file("model.json"));

  CHECK(loaded.u == 2);
  CHECK(loaded.v == 3);
  REQUIRE(loaded.bases.size() == 1);
  CHECK(loaded.bases[0].knots == ens.bases[0].knots);
  for (const auto& ind : data.individuals) {
    const Curve a = ens.predict(ind.x, ind.z);
    const Curve b = loaded.predict(ind.x, ind.z);
    CHECK((a.values == b.values).all());
  }
}

TEST_CASE("version mismatch is rejected") {
  const Dataset data = gen_dataset_a(30, 63);
  BoostConfig config;
  config.K = 2;
  const EnsembleStatic ens = fit_static(data, config);
  TempDir dir;
  save_model(ens, dir.file("model.json"));
  CHECK_THROWS(load_dynamic_model(dir.file("model.json")));

  std::ofstream bad(dir.file("bad.json"));
  bad << "{\"version\": \"boostr-static-v999\"}";
  bad.close();
  CHECK_THROWS(load_static_model(dir.file("bad.json")));
}
