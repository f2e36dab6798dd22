#include "qmcsdf/pipeline.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "qmcsdf/errors.hpp"
#include "qmcsdf/rng.hpp"

namespace qmcsdf {

using nlohmann::json;

std::filesystem::path meta_path(const std::filesystem::path& artifact) {
  std::filesystem::path p = artifact;
  p += ".meta.json";
  return p;
}

void write_meta(const std::filesystem::path& artifact, const json& meta) {
  std::ofstream out(meta_path(artifact));
  if (!out) throw Error("cannot write " + meta_path(artifact).string());
  out << meta.dump(2) << '\n';
}

json read_meta(const std::filesystem::path& artifact) {
  std::ifstream in(meta_path(artifact));
  if (!in) throw Error("cannot open " + meta_path(artifact).string());
  return json::parse(in);
}

TriangleMesh make_shape(const std::string& name) {
  if (name == "sphere") return make_icosphere(0.5, 4);
  if (name == "torus") return make_torus(0.5, 0.2, 64, 32);
  if (name == "box") return make_box(Vec3(-0.4, -0.3, -0.5), Vec3(0.4, 0.3, 0.5));
  throw std::invalid_argument("unknown shape '" + name + "'");
}

SdfGrid evaluate_on_lattice(const MlpRegressor& net, const SdfGrid& lattice) {
  SdfGrid out(lattice.resolution(), lattice.box());
  const auto [nx, ny, nz] = lattice.resolution();
  PointMatrix layer(static_cast<Eigen::Index>(nx) * ny, 3);
  for (int k = 0; k < nz; ++k) {
    Eigen::Index r = 0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) layer.row(r++) = lattice.node(i, j, k).transpose();
    const Eigen::VectorXd v = net.forward_batch(layer);
    for (Eigen::Index n = 0; n < v.size(); ++n)
      out.values()[out.index(0, 0, k) + static_cast<std::size_t>(n)] = v[n];
  }
  return out;
}

SurfaceMetrics evaluate_surfaces(const TriangleMesh& reference, const TriangleMesh& reconstruction,
                                 const SdfGrid& reference_grid, const SdfGrid& reconstruction_grid,
                                 Eigen::Index n_points, Eigen::Index emd_points, std::uint64_t seed) {
  if (n_points < 1 || emd_points < 1 || emd_points > n_points)
    throw std::invalid_argument("evaluate_surfaces: need 1 <= emd_points <= n_points");
  SurfaceMetrics m;
  m.n_points = n_points;
  m.emd_points = emd_points;
  m.iou = iou(reference_grid, reconstruction_grid);
  // one sampling seed for both surfaces, so identical meshes score exactly zero
  const std::uint64_t sample_seed = derive_seed(seed, "surface_samples");
  m.seeds = {sample_seed};
  m.emd_method = emd_points <= kExactEmdLimit ? "exact" : "entropic";
  if (reference.empty() || reconstruction.empty()) return m;

  const PointMatrix a = sample_surface(reference, n_points, sample_seed);
  const PointMatrix b = sample_surface(reconstruction, n_points, sample_seed);
  m.chamfer = chamfer(a, b);
  const PointMatrix ea = a.topRows(emd_points);
  const PointMatrix eb = b.topRows(emd_points);
  if (m.emd_method == "exact") {
    m.emd = emd_exact(ea, eb);
  } else {
    const EntropicResult r = emd_entropic(ea, eb);
    m.emd = r.value;
    m.emd_converged = r.converged;
  }
  return m;
}

json metrics_report(const SurfaceMetrics& m) {
  auto value = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json rows = json::array();
  rows.push_back({{"metric", "chamfer"},
                  {"value", value(m.chamfer)},
                  {"scale_hint", 1000.0},
                  {"n_points", m.n_points},
                  {"seeds", m.seeds},
                  {"definition", "sum of squared nearest distances, both directions"}});
  rows.push_back({{"metric", "emd"},
                  {"value", value(m.emd)},
                  {"scale_hint", 100.0},
                  {"n_points", m.emd_points},
                  {"seeds", m.seeds},
                  {"method", m.emd_method},
                  {"converged", m.emd_converged},
                  {"definition", "mean Euclidean cost of the optimal matching"}});
  rows.push_back({{"metric", "iou"},
                  {"value", m.iou},
                  {"scale_hint", 100.0},
                  {"n_points", nullptr},
                  {"seeds", json::array()},
                  {"definition", "grid nodes with negative value"}});
  return rows;
}

namespace {

json bands_json(const BandSpec& spec) {
  json bands = json::array();
  for (std::size_t b = 0; b < spec.bands.size(); ++b)
    bands.push_back({{"lo", spec.bands[b].first}, {"hi", spec.bands[b].second}, {"fraction", spec.fractions[b]}});
  return bands;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& c) {
  PipelineResult result;
  std::filesystem::create_directories(c.out_dir);
  auto artifact = [&](const std::string& name) {
    const std::filesystem::path p = c.out_dir / name;
    result.artifacts.push_back(p);
    return p;
  };

  const TriangleMesh source = c.mesh_path.empty() ? make_shape(c.shape) : load_obj(c.mesh_path);
  const Normalization norm = normalize_mesh(source);
  save_obj(artifact("normalized.obj"), norm.mesh);

  const Bvh bvh(norm.mesh);
  const SdfGrid grid = bake_grid(bvh, norm.mesh, {c.grid_resolution, c.grid_resolution, c.grid_resolution});
  const auto grid_path = artifact("grid.sdfg");
  write_sdfg(grid_path, grid);
  const json source_json = c.mesh_path.empty() ? json{{"shape", c.shape}} : json{{"mesh", c.mesh_path.string()}};
  write_meta(grid_path, {{"artifact", "sdf grid"},
                         {"source", source_json},
                         {"resolution", c.grid_resolution},
                         {"box", {-1.0, -1.0, -1.0, 1.0, 1.0, 1.0}},
                         {"normalization", {{"scale", norm.scale}, {"offset", {norm.offset.x(), norm.offset.y(), norm.offset.z()}}}},
                         {"seed", c.seed}});

  DatasetConfig dc = c.dataset;
  dc.seed = c.seed;
  const Dataset ds = build_dataset(grid, dc);
  result.warnings = ds.warnings;
  const json dataset_meta = {{"sampler", dc.sampler},
                             {"resolution", dc.resolution},
                             {"jitter_sigma", dc.jitter_sigma},
                             {"near_band", dc.near_band},
                             {"train_size", dc.train_size},
                             {"validation_size", dc.validation_size},
                             {"bands", bands_json(dc.bands)},
                             {"seed", dc.seed}};
  const std::pair<const char*, const TrainingData*> sets[] = {
      {"initial", &ds.initial}, {"train", &ds.train}, {"validation", &ds.validation}};
  for (const auto& [name, data] : sets) {
    const auto path = artifact(std::string(name) + ".pset");
    write_pset(path, data->points);
    json meta = dataset_meta;
    meta["artifact"] = std::string(name) + " point set";
    meta["count"] = data->size();
    write_meta(path, meta);
  }

  TrainConfig tc = c.training;
  tc.seed = c.seed;
  result.run = train(ds.train, ds.validation, tc);
  {
    std::ostringstream csv;
    write_train_csv(csv, result.run);
    write_text(artifact("train.csv"), csv.str());
  }
  write_checkpoint(artifact("net.mlpw"), result.run.net);

  const SdfGrid predicted = evaluate_on_lattice(result.run.net, grid);
  const auto pred_path = artifact("prediction.sdfg");
  write_sdfg(pred_path, predicted);
  write_meta(pred_path, {{"artifact", "network prediction grid"},
                         {"resolution", c.grid_resolution},
                         {"selector", tc.selector},
                         {"epochs", tc.epochs},
                         {"seed", c.seed}});
  const TriangleMesh recon = marching_cubes(predicted);
  save_obj(artifact("recon.obj"), recon);
  if (recon.empty()) result.warnings.push_back("reconstruction is empty; surface metrics skipped");

  result.metrics = evaluate_surfaces(norm.mesh, recon, grid, predicted, c.eval_points, c.emd_points,
                                     derive_seed(c.seed, "eval"));
  write_text(artifact("metrics.json"), metrics_report(result.metrics).dump(2) + "\n");

  const json run = {{"source", source_json},
                    {"grid_resolution", c.grid_resolution},
                    {"dataset", dataset_meta},
                    {"training",
                     {{"selector", tc.selector},
                      {"epochs", tc.epochs},
                      {"epoch_points", tc.epoch_points},
                      {"step_batch", tc.step_batch},
                      {"lr", tc.adam.lr},
                      {"beta1", tc.adam.beta1},
                      {"beta2", tc.adam.beta2},
                      {"eps", tc.adam.eps},
                      {"widths", tc.widths},
                      {"accuracy_band", tc.accuracy_band},
                      {"accuracy_definition", kAccuracyDefinition}}},
                    {"eval_points", c.eval_points},
                    {"emd_points", c.emd_points},
                    {"seed", c.seed},
                    {"warnings", result.warnings}};
  write_text(artifact("run.json"), run.dump(2) + "\n");
  return result;
}

}  // namespace qmcsdf
