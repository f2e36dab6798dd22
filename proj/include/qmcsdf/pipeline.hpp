#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmcsdf/marching_cubes.hpp"
#include "qmcsdf/metrics.hpp"
#include "qmcsdf/train.hpp"

namespace qmcsdf {

/// Sidecar written next to a binary artifact: `<file>.meta.json`.
std::filesystem::path meta_path(const std::filesystem::path& artifact);
void write_meta(const std::filesystem::path& artifact, const nlohmann::json& meta);
nlohmann::json read_meta(const std::filesystem::path& artifact);

/// Closed mesh of a named test shape (sphere, torus, box).
TriangleMesh make_shape(const std::string& name);

/// Network predictions at every node of `lattice`.
SdfGrid evaluate_on_lattice(const MlpRegressor& net, const SdfGrid& lattice);

struct SurfaceMetrics {
  std::optional<double> chamfer;
  std::optional<double> emd;
  std::string emd_method;
  bool emd_converged = true;
  double iou = 0.0;
  Eigen::Index n_points = 0;
  Eigen::Index emd_points = 0;
  std::vector<std::uint64_t> seeds;
};

/// Chamfer on `n_points` surface samples per mesh, EMD on the first
/// `emd_points` of them (exact up to 512, entropic above), IoU of the grids.
/// Empty meshes leave chamfer and EMD unset.
SurfaceMetrics evaluate_surfaces(const TriangleMesh& reference, const TriangleMesh& reconstruction,
                                 const SdfGrid& reference_grid, const SdfGrid& reconstruction_grid,
                                 Eigen::Index n_points, Eigen::Index emd_points, std::uint64_t seed);

/// Report rows {metric, value, scale_hint, n_points, seeds}.
nlohmann::json metrics_report(const SurfaceMetrics& m);

struct PipelineConfig {
  std::filesystem::path mesh_path;  // empty: use `shape`
  std::string shape = "sphere";
  int grid_resolution = 64;
  DatasetConfig dataset;
  TrainConfig training;
  Eigen::Index eval_points = 2048;
  Eigen::Index emd_points = 512;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "run";
};

struct PipelineResult {
  TrainRun run;
  SurfaceMetrics metrics;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> artifacts;
};

/// mesh -> normalize -> bake -> initial set -> band selection -> training ->
/// extraction -> metrics, writing every intermediate into `out_dir`. Stage
/// seeds derive from `seed`, which overrides the dataset and training seeds.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace qmcsdf
