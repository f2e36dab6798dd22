// qmcsdf command-line driver.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmcsdf/config.hpp"
#include "qmcsdf/discrepancy.hpp"
#include "qmcsdf/errors.hpp"
#include "qmcsdf/parallel.hpp"
#include "qmcsdf/pipeline.hpp"
#include "qmcsdf/rng.hpp"
#include "qmcsdf/spectrum.hpp"
#include "qmcsdf/symmetry.hpp"

using namespace qmcsdf;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

const std::vector<std::string> kSubcommands = {"bake",     "sample", "select", "discrepancy", "spectrum",
                                               "train",    "extract", "eval",  "pair",        "pipeline"};
const std::vector<std::string> kSamplers2d = {"grid", "jitter", "sobol", "halton", "random"};
const std::vector<std::string> kDatasetSamplers = {"grid", "jitter", "sobol", "random"};
const std::vector<std::string> kSelectors = {"fps", "random"};
const std::vector<std::string> kShapes = {"sphere", "torus", "box"};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config entries become `--key=value` arguments placed right after the
// subcommand, ahead of the user's own flags, which therefore win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;
  KeyValueConfig cfg;
  try {
    cfg = KeyValueConfig::load(config_path);
  } catch (const std::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  std::size_t insert_at = args.size();
  for (std::size_t i = 1; i < args.size(); ++i)
    if (std::find(kSubcommands.begin(), kSubcommands.end(), args[i]) != kSubcommands.end()) {
      insert_at = i + 1;
      break;
    }
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.entries()) extra.push_back("--" + key + "=" + value);
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), extra.begin(), extra.end());
  return args;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

json params_json(const PointSet& ps) {
  json p = json::object();
  for (const auto& [k, v] : ps.params) p[k] = v;
  return p;
}

PointMatrix select_rows(const PointMatrix& points, const std::string& selector, Eigen::Index k, std::uint64_t seed) {
  if (selector == "fps") return gather_rows(points, fps_select(points, k, seed));
  if (selector == "random") return gather_rows(points, random_select(points.rows(), k, seed));
  return points;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------- bake
struct BakeArgs {
  std::string mesh;
  int resolution = 128;
  std::string out;
  std::string normalized;
};

int run_bake(const BakeArgs& a) {
  const TriangleMesh mesh = load_obj(a.mesh);
  const Normalization norm = normalize_mesh(mesh);
  const Bvh bvh(norm.mesh);
  const SdfGrid grid = bake_grid(bvh, norm.mesh, {a.resolution, a.resolution, a.resolution});
  write_sdfg(a.out, grid);
  write_meta(a.out, {{"artifact", "sdf grid"},
                     {"mesh", a.mesh},
                     {"resolution", a.resolution},
                     {"box", {-1.0, -1.0, -1.0, 1.0, 1.0, 1.0}},
                     {"normalization", {{"scale", norm.scale}, {"offset", {norm.offset.x(), norm.offset.y(), norm.offset.z()}}}}});
  if (!a.normalized.empty()) save_obj(a.normalized, norm.mesh);
  const auto [lo, hi] = std::minmax_element(grid.values().begin(), grid.values().end());
  std::cout << "baked " << a.resolution << "^3 grid, sdf range [" << *lo << ", " << *hi << "], scale " << norm.scale
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- sample
struct SampleArgs {
  std::string sampler = "grid";
  Eigen::Index n = 4096;
  int res = 64;
  int dim = 2;
  double sigma = 0.01;
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
};

int run_sample(const SampleArgs& a) {
  PointSet ps;
  if (a.sampler == "grid") ps = gen_grid(a.res, a.dim);
  else if (a.sampler == "jitter") ps = gen_jitter(a.res, a.dim, a.sigma, derive_seed(a.seed, "jitter"));
  else if (a.sampler == "sobol") ps = gen_sobol(a.n, a.dim);
  else if (a.sampler == "halton") ps = gen_halton(a.n, a.dim);
  else ps = gen_random(a.n, a.dim, derive_seed(a.seed, "random"));
  write_pset(a.out, ps.points);
  write_meta(a.out, {{"artifact", "point set"},
                     {"sampler", ps.sampler},
                     {"dim", ps.dim},
                     {"count", ps.size()},
                     {"params", params_json(ps)},
                     {"seed", a.seed},
                     {"stage_seed", ps.seed}});
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    write_points_csv(out, ps.points);
  }
  std::cout << ps.size() << " " << ps.sampler << " points in " << ps.dim << "D -> " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- select
struct SelectArgs {
  std::string in;
  std::string method = "fps";
  Eigen::Index k = 1024;
  std::uint64_t seed = 0;
  std::string grid;
  std::string out;
  std::string points_out;
};

int run_select(const SelectArgs& a) {
  const PointMatrix points = read_pset(a.in);
  IndexList chosen;
  json extra = json::object();
  if (a.method == "fps") {
    chosen = fps_select(points, a.k, derive_seed(a.seed, "select"));
  } else if (a.method == "random") {
    chosen = random_select(points.rows(), a.k, derive_seed(a.seed, "select"));
  } else {
    if (a.grid.empty()) throw UsageError("band selection needs --grid");
    if (points.cols() != 3) throw UsageError("band selection needs 3D points");
    const SdfGrid grid = read_sdfg(a.grid);
    const PointMatrix in_box = map_to_box(points, grid.box().min(), grid.box().max());
    const TrainingData data = attach_sdf(grid, in_box);
    const BandSelection sel = band_select(data.sdf, BandSpec::near_surface(), a.k, derive_seed(a.seed, "bands"));
    for (const auto& w : sel.warnings) std::cerr << "warning: " << w << "\n";
    chosen = sel.indices;
    extra["per_band"] = sel.per_band;
    extra["warnings"] = sel.warnings;
  }
  write_index_list(a.out, chosen);
  json meta = {{"artifact", "index list"}, {"source", a.in}, {"method", a.method}, {"k", a.k}, {"seed", a.seed}};
  meta.update(extra);
  write_meta(a.out, meta);
  if (!a.points_out.empty()) {
    write_pset(a.points_out, gather_rows(points, chosen));
    write_meta(a.points_out, meta);
  }
  std::cout << chosen.size() << " of " << points.rows() << " points selected by " << a.method << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- discrepancy
struct DiscrepancyArgs {
  std::string sampler = "grid";
  std::string selector = "fps";
  int side = 256;
  double sigma = 0.01;
  std::vector<Eigen::Index> sizes{1024, 2048, 4096};
  int trials = 10;
  std::uint64_t seeds = 0;
  bool table = false;
  std::string json_out;
};

int run_discrepancy(const DiscrepancyArgs& a) {
  std::vector<DiscrepancyExperiment> runs;
  auto make = [&](const std::string& sampler, const std::string& selector) {
    DiscrepancyExperiment ex;
    ex.sampler = sampler;
    ex.selector = selector;
    ex.initial_side = a.side;
    ex.jitter_sigma = a.sigma;
    ex.subset_sizes = a.sizes;
    ex.trials = a.trials;
    ex.seed = a.seeds;
    return ex;
  };
  if (a.table) {
    runs = {make("grid", "random"), make("grid", "fps"), make("jitter", "fps"), make("sobol", "fps")};
  } else {
    runs = {make(a.sampler, a.selector)};
  }

  std::cout << "star discrepancy x1e2 (mean +- std over " << a.trials << " trials, initial " << a.side << "^2)\n";
  std::cout << std::left << std::setw(16) << "method";
  for (auto k : a.sizes) std::cout << std::right << std::setw(18) << k;
  std::cout << "\n";
  json report = json::array();
  for (const auto& ex : runs) {
    const auto rows = run_discrepancy_experiment(ex);
    std::cout << std::left << std::setw(16) << experiment_label(ex.sampler, ex.selector);
    for (const auto& r : rows) {
      std::cout << std::right << std::setw(18) << (fixed(r.mean * 100, 2) + " +- " + fixed(r.stddev * 100, 2));
      report.push_back({{"label", r.label},
                        {"initial_size", r.initial_size},
                        {"subset_size", r.subset_size},
                        {"trials", r.trials},
                        {"mean", r.mean},
                        {"stddev", r.stddev},
                        {"values", r.values},
                        {"seeds", r.seeds},
                        {"jitter_sigma", ex.jitter_sigma},
                        {"root_seed", ex.seed}});
    }
    std::cout << "\n";
  }
  if (!a.json_out.empty()) write_file(a.json_out, report.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- spectrum
struct SpectrumArgs {
  std::string sampler = "jitter";
  std::string selector = "fps";
  int side = 256;
  Eigen::Index k = 2048;
  double sigma = 0.01;
  int realizations = 10;
  int extent = 64;
  int bins = 32;
  std::uint64_t seeds = 0;
  std::string csv;
  std::string pgm;
  std::string radial;
};

int run_spectrum(const SpectrumArgs& a) {
  std::vector<PointMatrix> sets(static_cast<std::size_t>(a.realizations));
  for (int r = 0; r < a.realizations; ++r) {
    const std::uint64_t ts = trial_seed(a.seeds, r);
    const PointSet initial = make_initial_set(a.sampler, a.side, a.sigma, ts);
    sets[static_cast<std::size_t>(r)] = select_rows(initial.points, a.selector, a.k, derive_seed(ts, "select"));
  }
  const SpectrumGrid spec = power_spectrum(sets, a.extent);
  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    write_spectrum_csv(out, spec);
  }
  if (!a.pgm.empty()) write_spectrum_pgm(a.pgm, spec);
  const auto bins = radial_average(spec, a.bins);
  std::ostringstream radial;
  radial << "radius,mean_power,count\n" << std::setprecision(17);
  for (const auto& b : bins) radial << b.radius << ',' << b.mean_power << ',' << b.count << '\n';
  if (!a.radial.empty()) write_file(a.radial, radial.str());
  std::cout << a.sampler << "+" << a.selector << ", " << a.realizations << " realizations of "
            << spec.points_per_set << " points; radial profile / N:\n";
  for (const auto& b : bins)
    std::cout << "  r=" << fixed(b.radius, 2) << "  " << fixed(b.mean_power / static_cast<double>(spec.points_per_set), 4)
              << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train
struct TrainArgs {
  std::string grid;
  std::string sampler = "grid";
  int resolution = 64;
  std::string selector = "fps";
  int epochs = 30;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  std::string csv;
  std::string checkpoint;
};

int run_train(const TrainArgs& a) {
  const SdfGrid grid = read_sdfg(a.grid);
  DatasetConfig dc;
  dc.sampler = a.sampler;
  dc.resolution = a.resolution;
  dc.seed = a.seed;
  const Dataset ds = build_dataset(grid, dc);
  for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";
  TrainConfig tc;
  tc.selector = a.selector;
  tc.epochs = a.epochs;
  tc.adam.lr = a.lr;
  tc.seed = a.seed;
  const TrainRun run = train(ds.train, ds.validation, tc);
  std::ostringstream csv;
  write_train_csv(csv, run);
  if (a.csv.empty()) std::cout << csv.str();
  else write_file(a.csv, csv.str());
  if (!a.checkpoint.empty()) write_checkpoint(a.checkpoint, run.net);
  return kExitOk;
}

// ---------------------------------------------------------------- extract
struct ExtractArgs {
  std::string grid;
  std::string checkpoint;
  int resolution = 128;
  double iso = 0.0;
  bool weld = false;
  std::string out;
};

int run_extract(const ExtractArgs& a) {
  if (a.grid.empty() == a.checkpoint.empty()) throw UsageError("give exactly one of --grid and --checkpoint");
  TriangleMesh mesh;
  if (!a.grid.empty()) {
    mesh = marching_cubes(read_sdfg(a.grid), a.iso);
  } else {
    const MlpRegressor net = read_checkpoint(a.checkpoint);
    const SdfGrid lattice({a.resolution, a.resolution, a.resolution}, default_sdf_box());
    mesh = marching_cubes(evaluate_on_lattice(net, lattice), a.iso);
  }
  if (a.weld) mesh = weld_vertices(mesh);
  save_obj(a.out, mesh);
  std::cout << mesh.num_vertices() << " vertices, " << mesh.num_triangles() << " triangles -> " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval
struct EvalArgs {
  std::string a;
  std::string b;
  std::string grid_a;
  std::string grid_b;
  Eigen::Index points = 2048;
  Eigen::Index emd_points = 512;
  std::uint64_t seed = 0;
  std::string json_out;
};

int run_eval(const EvalArgs& e) {
  const TriangleMesh ma = load_obj(e.a);
  const TriangleMesh mb = load_obj(e.b);
  const std::uint64_t sample_seed = derive_seed(e.seed, "surface_samples");
  const PointMatrix pa = sample_surface(ma, e.points, sample_seed);
  const PointMatrix pb = sample_surface(mb, e.points, sample_seed);
  SurfaceMetrics m;
  m.n_points = e.points;
  m.emd_points = e.emd_points;
  m.seeds = {sample_seed};
  m.chamfer = chamfer(pa, pb);
  if (e.emd_points < 1 || e.emd_points > e.points) throw UsageError("--emd-points must be in [1, --points]");
  if (e.emd_points <= kExactEmdLimit) {
    m.emd_method = "exact";
    m.emd = emd_exact(pa.topRows(e.emd_points), pb.topRows(e.emd_points));
  } else {
    m.emd_method = "entropic";
    const EntropicResult r = emd_entropic(pa.topRows(e.emd_points), pb.topRows(e.emd_points));
    m.emd = r.value;
    m.emd_converged = r.converged;
  }
  json report = metrics_report(m);
  const bool have_iou = !e.grid_a.empty() && !e.grid_b.empty();
  if (have_iou) {
    m.iou = iou(read_sdfg(e.grid_a), read_sdfg(e.grid_b));
    report[2]["value"] = m.iou;
  } else {
    report.erase(2);
  }
  std::cout << "chamfer x1e3: " << fixed(*m.chamfer * 1e3, 4) << "\n";
  std::cout << "emd x1e2 (" << m.emd_method << ", " << m.emd_points << " points): " << fixed(*m.emd * 1e2, 4)
            << (m.emd_converged ? "" : "  [not converged]") << "\n";
  if (have_iou) std::cout << "iou %: " << fixed(m.iou * 100, 2) << "\n";
  if (!e.json_out.empty()) write_file(e.json_out, report.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- pair
struct PairArgs {
  std::string mesh;
  std::string shape = "sphere";
  std::string camera;
  int width = 128;
  int height = 128;
  double focal = 160.0;
  std::vector<double> eye{2.0, 1.0, 1.6};
  std::string mode = "near";
  Eigen::Index n = 256;
  std::uint64_t seed = 0;
  std::string out;
  std::string depth_pfm;
  std::string normal_pfm;
};

int run_pair(const PairArgs& a) {
  const TriangleMesh source = a.mesh.empty() ? make_shape(a.shape) : load_obj(a.mesh);
  const TriangleMesh mesh = normalize_mesh(source).mesh;
  const Bvh bvh(mesh);
  const CameraModel camera = a.camera.empty()
                                 ? look_at_camera(Vec3(a.eye[0], a.eye[1], a.eye[2]), Vec3::Zero(), Vec3::UnitZ(), a.focal,
                                                  a.width, a.height)
                                 : load_camera(a.camera);
  const DepthImage depth = render_depth(bvh, mesh, camera);
  const FeatureImage features = render_features(bvh, mesh, camera);
  if (!a.depth_pfm.empty()) write_pfm(a.depth_pfm, depth);
  if (!a.normal_pfm.empty()) write_pfm(a.normal_pfm, extract_channels(features, 1, 3));

  const FusionMode mode = parse_fusion_mode(a.mode);
  const PointMatrix pts = sample_surface(mesh, a.n, derive_seed(a.seed, "pair"));
  std::vector<SymmetricPair> pairs;
  int skipped = 0;
  int one_visible = 0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    try {
      pairs.push_back(symmetric_pair(camera, depth, features, pts.row(i).transpose(), mode));
      one_visible += pairs.back().vis_p.visible || pairs.back().vis_q.visible;
    } catch (const OutOfDomainError&) {
      ++skipped;
    }
  }
  std::ostringstream csv;
  write_pairs_csv(csv, pairs, mode);
  if (a.out.empty()) std::cout << csv.str();
  else write_file(a.out, csv.str());
  std::cerr << pairs.size() << " pairs (" << skipped << " out of view), at least one side visible in " << one_visible
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- pipeline
struct PipelineArgs {
  std::string mesh;
  std::string shape = "sphere";
  std::string sampler = "grid";
  std::string selector = "fps";
  int epochs = 30;
  std::uint64_t seed = 0;
  std::string out_dir = "run";
  int resolution = 64;
  int dataset_resolution = 64;
  double lr = 1e-4;
  Eigen::Index eval_points = 2048;
  Eigen::Index emd_points = 512;
};

int run_pipeline_cmd(const PipelineArgs& a) {
  PipelineConfig c;
  c.mesh_path = a.mesh;
  c.shape = a.shape;
  c.grid_resolution = a.resolution;
  c.dataset.sampler = a.sampler;
  c.dataset.resolution = a.dataset_resolution;
  c.training.selector = a.selector;
  c.training.epochs = a.epochs;
  c.training.adam.lr = a.lr;
  c.eval_points = a.eval_points;
  c.emd_points = a.emd_points;
  c.seed = a.seed;
  c.out_dir = a.out_dir;
  const PipelineResult r = run_pipeline(c);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "initial accuracy " << fixed(r.run.initial_accuracy, 4) << "\n";
  for (const auto& e : r.run.history)
    std::cout << "epoch " << e.epoch << "  loss " << std::scientific << std::setprecision(4) << e.loss << std::defaultfloat
              << "  accuracy " << fixed(e.accuracy, 4) << "\n";
  const auto& m = r.metrics;
  if (m.chamfer) std::cout << "chamfer x1e3 " << fixed(*m.chamfer * 1e3, 4) << "\n";
  if (m.emd) std::cout << "emd x1e2 " << fixed(*m.emd * 1e2, 4) << "\n";
  std::cout << "iou % " << fixed(m.iou * 100, 2) << "\n";
  std::cout << r.artifacts.size() << " artifacts in " << a.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Sampling, SDF and reconstruction toolkit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  int workers = 0;
  std::string config_path;
  app.add_option("--workers", workers, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  app.add_option("--config", config_path, "key=value file; flags override it");

  const auto samplers = CLI::IsMember(kSamplers2d);
  const auto dataset_samplers = CLI::IsMember(kDatasetSamplers);
  const auto selectors = CLI::IsMember(kSelectors);

  BakeArgs bake;
  auto* c_bake = app.add_subcommand("bake", "normalize a mesh and bake its SDF grid");
  c_bake->add_option("--mesh", bake.mesh, "input OBJ")->required()->check(CLI::ExistingFile);
  c_bake->add_option("--resolution", bake.resolution, "nodes per axis")->check(CLI::Range(2, 1024));
  c_bake->add_option("--out", bake.out, "output SDFG")->required();
  c_bake->add_option("--normalized", bake.normalized, "write the normalized mesh here");

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "generate a point set in the unit cube");
  c_sample->add_option("--sampler", sample.sampler)->check(samplers);
  c_sample->add_option("--n", sample.n, "points (sobol, halton, random)")->check(CLI::PositiveNumber);
  c_sample->add_option("--res", sample.res, "points per axis (grid, jitter)")->check(CLI::PositiveNumber);
  c_sample->add_option("--dim", sample.dim)->check(CLI::Range(1, 3));
  c_sample->add_option("--sigma", sample.sigma, "jitter standard deviation")->check(CLI::NonNegativeNumber);
  c_sample->add_option("--seed", sample.seed);
  c_sample->add_option("--out", sample.out, "output PSET")->required();
  c_sample->add_option("--csv", sample.csv);

  SelectArgs select;
  auto* c_select = app.add_subcommand("select", "choose a subset of a point set");
  c_select->add_option("--in", select.in, "input PSET")->required()->check(CLI::ExistingFile);
  c_select->add_option("--method", select.method)->check(CLI::IsMember({"fps", "random", "band"}));
  c_select->add_option("--k", select.k)->check(CLI::PositiveNumber);
  c_select->add_option("--seed", select.seed);
  c_select->add_option("--grid", select.grid, "SDFG for band selection")->check(CLI::ExistingFile);
  c_select->add_option("--out", select.out, "output IDXL")->required();
  c_select->add_option("--points-out", select.points_out, "also write the chosen points as PSET");

  DiscrepancyArgs disc;
  auto* c_disc = app.add_subcommand("discrepancy", "star discrepancy of selected subsets");
  c_disc->add_option("--sampler", disc.sampler)->check(samplers);
  c_disc->add_option("--selector", disc.selector)->check(selectors);
  c_disc->add_option("--side", disc.side, "initial set has side^2 points")->check(CLI::PositiveNumber);
  c_disc->add_option("--sigma", disc.sigma)->check(CLI::NonNegativeNumber);
  c_disc->add_option("--sizes", disc.sizes)->delimiter(',');
  c_disc->add_option("--trials", disc.trials)->check(CLI::PositiveNumber);
  c_disc->add_option("--seeds", disc.seeds, "root seed; trial seeds derive from it");
  c_disc->add_flag("--table", disc.table, "run the four standard sampler/selector rows");
  c_disc->add_option("--json", disc.json_out);

  SpectrumArgs spec;
  auto* c_spec = app.add_subcommand("spectrum", "averaged power spectrum of selected subsets");
  c_spec->add_option("--sampler", spec.sampler)->check(samplers);
  c_spec->add_option("--selector", spec.selector)->check(CLI::IsMember({"fps", "random", "none"}));
  c_spec->add_option("--side", spec.side)->check(CLI::PositiveNumber);
  c_spec->add_option("--k", spec.k)->check(CLI::PositiveNumber);
  c_spec->add_option("--sigma", spec.sigma)->check(CLI::NonNegativeNumber);
  c_spec->add_option("--realizations", spec.realizations)->check(CLI::PositiveNumber);
  c_spec->add_option("--trials", spec.realizations, "alias of --realizations")->check(CLI::PositiveNumber);
  c_spec->add_option("--extent", spec.extent)->check(CLI::PositiveNumber);
  c_spec->add_option("--bins", spec.bins)->check(CLI::PositiveNumber);
  c_spec->add_option("--seeds", spec.seeds);
  c_spec->add_option("--csv", spec.csv);
  c_spec->add_option("--pgm", spec.pgm);
  c_spec->add_option("--radial", spec.radial);

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "fit the field regressor to a baked grid");
  c_train->add_option("--grid", tr.grid)->required()->check(CLI::ExistingFile);
  c_train->add_option("--sampler", tr.sampler)->check(dataset_samplers);
  c_train->add_option("--resolution", tr.resolution, "initial set points per axis")->check(CLI::Range(2, 512));
  c_train->add_option("--selector", tr.selector)->check(selectors);
  c_train->add_option("--epochs", tr.epochs)->check(CLI::NonNegativeNumber);
  c_train->add_option("--lr", tr.lr)->check(CLI::PositiveNumber);
  c_train->add_option("--seed", tr.seed);
  c_train->add_option("--csv", tr.csv);
  c_train->add_option("--checkpoint", tr.checkpoint);

  ExtractArgs ex;
  auto* c_extract = app.add_subcommand("extract", "marching cubes on a grid or a trained network");
  c_extract->add_option("--grid", ex.grid)->check(CLI::ExistingFile);
  c_extract->add_option("--checkpoint", ex.checkpoint)->check(CLI::ExistingFile);
  c_extract->add_option("--resolution", ex.resolution, "lattice for --checkpoint")->check(CLI::Range(2, 1024));
  c_extract->add_option("--iso", ex.iso);
  c_extract->add_flag("--weld", ex.weld, "merge vertices closer than 1e-9");
  c_extract->add_option("--out", ex.out)->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "chamfer, EMD and IoU between two shapes");
  c_eval->add_option("--a", ev.a, "reference OBJ")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--b", ev.b, "compared OBJ")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--grid-a", ev.grid_a)->check(CLI::ExistingFile);
  c_eval->add_option("--grid-b", ev.grid_b)->check(CLI::ExistingFile);
  c_eval->add_option("--points", ev.points)->check(CLI::PositiveNumber);
  c_eval->add_option("--emd-points", ev.emd_points)->check(CLI::PositiveNumber);
  c_eval->add_option("--seed", ev.seed);
  c_eval->add_option("--json", ev.json_out);

  PairArgs pair;
  auto* c_pair = app.add_subcommand("pair", "symmetric-point feature lookup demo");
  c_pair->add_option("--mesh", pair.mesh)->check(CLI::ExistingFile);
  c_pair->add_option("--shape", pair.shape)->check(CLI::IsMember(kShapes));
  c_pair->add_option("--camera", pair.camera)->check(CLI::ExistingFile);
  c_pair->add_option("--width", pair.width)->check(CLI::PositiveNumber);
  c_pair->add_option("--height", pair.height)->check(CLI::PositiveNumber);
  c_pair->add_option("--focal", pair.focal)->check(CLI::PositiveNumber);
  c_pair->add_option("--eye", pair.eye)->expected(3)->delimiter(',');
  c_pair->add_option("--mode", pair.mode)->check(CLI::IsMember({"base", "near", "avg", "concat"}));
  c_pair->add_option("--n", pair.n)->check(CLI::PositiveNumber);
  c_pair->add_option("--seed", pair.seed);
  c_pair->add_option("--out", pair.out);
  c_pair->add_option("--depth-pfm", pair.depth_pfm);
  c_pair->add_option("--normal-pfm", pair.normal_pfm);

  PipelineArgs pipe;
  auto* c_pipe = app.add_subcommand("pipeline", "bake, sample, select, train, extract and evaluate");
  c_pipe->add_option("--mesh", pipe.mesh)->check(CLI::ExistingFile);
  c_pipe->add_option("--shape", pipe.shape)->check(CLI::IsMember(kShapes));
  c_pipe->add_option("--sampler", pipe.sampler)->check(dataset_samplers);
  c_pipe->add_option("--selector", pipe.selector)->check(selectors);
  c_pipe->add_option("--epochs", pipe.epochs)->check(CLI::NonNegativeNumber);
  c_pipe->add_option("--seed", pipe.seed);
  c_pipe->add_option("--out-dir", pipe.out_dir);
  c_pipe->add_option("--resolution", pipe.resolution, "SDF grid nodes per axis")->check(CLI::Range(2, 512));
  c_pipe->add_option("--dataset-resolution", pipe.dataset_resolution)->check(CLI::Range(2, 512));
  c_pipe->add_option("--lr", pipe.lr)->check(CLI::PositiveNumber);
  c_pipe->add_option("--eval-points", pipe.eval_points)->check(CLI::PositiveNumber);
  c_pipe->add_option("--emd-points", pipe.emd_points)->check(CLI::PositiveNumber);

  std::vector<char*> cargv;
  for (auto& s : args) cargv.push_back(s.data());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (workers > 0) set_worker_count(workers);

  try {
    if (c_bake->parsed()) return run_bake(bake);
    if (c_sample->parsed()) return run_sample(sample);
    if (c_select->parsed()) return run_select(select);
    if (c_disc->parsed()) return run_discrepancy(disc);
    if (c_spec->parsed()) return run_spectrum(spec);
    if (c_train->parsed()) return run_train(tr);
    if (c_extract->parsed()) return run_extract(ex);
    if (c_eval->parsed()) return run_eval(ev);
    if (c_pair->parsed()) return run_pair(pair);
    if (c_pipe->parsed()) return run_pipeline_cmd(pipe);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
