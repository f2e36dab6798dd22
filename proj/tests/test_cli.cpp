#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "qmcsdf/pipeline.hpp"

using namespace qmcsdf;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(QMCSDF_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cli exit codes") {
  const auto dir = oracle::temp_path("cli");
  std::filesystem::create_directories(dir);
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("sample --sampler blue --out " + (dir / "x.pset").string()) == 2);
  CHECK(run("pipeline --shape sphere --sampler blue --out-dir " + (dir / "p").string()) == 2);
  CHECK(run("sample --sampler grid --res 8") == 2);
  CHECK(run("select --in " + (dir / "missing.pset").string() + " --out x.idxl") == 2);

  const auto bad = dir / "bad.obj";
  std::ofstream(bad) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n";
  CHECK(run("bake --mesh " + bad.string() + " --resolution 4 --out " + (dir / "bad.sdfg").string()) == 1);
}

TEST_CASE("cli bake, sample and eval") {
  const auto dir = oracle::temp_path("cli2");
  std::filesystem::create_directories(dir);
  const auto obj = dir / "ico.obj";
  save_obj(obj, make_icosphere(0.9, 3));
  const auto g1 = dir / "a.sdfg", g2 = dir / "b.sdfg";
  REQUIRE(run("bake --mesh " + obj.string() + " --resolution 33 --out " + g1.string()) == 0);
  REQUIRE(run("--workers 2 bake --mesh " + obj.string() + " --resolution 33 --out " + g2.string()) == 0);
  CHECK(slurp(g1) == slurp(g2));
  const SdfGrid g = read_sdfg(g1);
  const double lowest = *std::min_element(g.values().begin(), g.values().end());
  // the normalized sphere has unit radius and the centre node is on the lattice
  CHECK(lowest == doctest::Approx(-1.0).epsilon(0.01));
  const auto meta = read_meta(g1);
  CHECK(meta["normalization"]["scale"].get<double>() == doctest::Approx(1.0 / 0.9).epsilon(1e-6));
  CHECK(run("bake --mesh " + obj.string() + " --resolution 2 --out " + (dir / "c.sdfg").string()) == 0);
  CHECK(read_sdfg(dir / "c.sdfg").size() == 8);

  const auto p1 = dir / "a.pset", p2 = dir / "b.pset";
  CHECK(run("sample --sampler jitter --res 16 --dim 3 --sigma 0.02 --seed 4 --out " + p1.string()) == 0);
  CHECK(run("sample --sampler jitter --res 16 --dim 3 --sigma 0.02 --seed 4 --out " + p2.string()) == 0);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(read_meta(p1)["seed"] == 4);

  const auto cfg = dir / "sample.cfg";
  std::ofstream(cfg) << "sampler = random\nn = 77\n";
  CHECK(run("--config " + cfg.string() + " sample --out " + p2.string()) == 0);
  CHECK(read_pset(p2).rows() == 77);
  CHECK(run("--config " + cfg.string() + " sample --n 12 --out " + p2.string()) == 0);
  CHECK(read_pset(p2).rows() == 12);

  const auto report = dir / "m.json";
  REQUIRE(run("eval --a " + obj.string() + " --b " + obj.string() + " --grid-a " + g1.string() + " --grid-b " +
              g1.string() + " --points 512 --emd-points 64 --json " + report.string()) == 0);
  const auto rows = nlohmann::json::parse(slurp(report));
  for (const auto& r : rows) {
    if (r["metric"] == "chamfer") CHECK(r["value"].get<double>() == 0.0);
    if (r["metric"] == "emd") CHECK(r["value"].get<double>() == 0.0);
    if (r["metric"] == "iou") CHECK(r["value"].get<double>() == 1.0);
    CHECK(r.contains("scale_hint"));
  }
}

TEST_CASE("cli experiment commands") {
  const auto dir = oracle::temp_path("cli3");
  std::filesystem::create_directories(dir);
  CHECK(run("discrepancy --sampler grid --selector fps --side 32 --sizes 64,128 --trials 3 --seeds 5 --json " +
            (dir / "d.json").string()) == 0);
  const auto d = nlohmann::json::parse(slurp(dir / "d.json"));
  CHECK(d.dump().find("Grid+FPS") != std::string::npos);
  CHECK(run("spectrum --sampler random --selector none --side 16 --realizations 4 --extent 8 --csv " +
            (dir / "s.csv").string() + " --pgm " + (dir / "s.pgm").string()) == 0);
  CHECK(std::filesystem::exists(dir / "s.pgm"));
  CHECK(run("pair --shape torus --n 16 --mode near --width 48 --height 48 --out " + (dir / "pairs.csv").string() +
            " --depth-pfm " + (dir / "d.pfm").string()) == 0);
  CHECK(std::filesystem::exists(dir / "d.pfm"));
}

TEST_CASE("pipeline smoke run") {
  const auto dir = oracle::temp_path("pipe");
  std::filesystem::remove_all(dir);
  REQUIRE(run("pipeline --shape torus --epochs 0 --dataset-resolution 32 --eval-points 256 "
              "--emd-points 64 --seed 3 --out-dir " + dir.string()) == 0);
  for (const char* f : {"normalized.obj", "grid.sdfg", "initial.pset", "train.pset", "validation.pset", "train.csv",
                        "net.mlpw", "prediction.sdfg", "recon.obj", "metrics.json", "run.json"})
    CHECK(std::filesystem::exists(dir / f));
  const auto meta = read_meta(dir / "train.pset");
  CHECK(meta["seed"] == 3);
  CHECK(meta.contains("bands"));
  const auto run_json = nlohmann::json::parse(slurp(dir / "run.json"));
  CHECK(run_json["training"]["epochs"] == 0);
  CHECK(run_json["training"].contains("accuracy_definition"));
}
