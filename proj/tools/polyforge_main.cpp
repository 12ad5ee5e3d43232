// polyforge: raster-to-vector road polygon toolkit.
//
// Subcommands: synth, rasterize, heatmap, polygonize, evaluate, fit-sf,
// stitch, prep. Exit codes: 0 success, 2 input validation, 3 processing
// failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyforge/geojson.hpp"
#include "polyforge/metrics.hpp"
#include "polyforge/parallel.hpp"
#include "polyforge/png_io.hpp"
#include "polyforge/polygonize.hpp"
#include "polyforge/report.hpp"
#include "polyforge/synth.hpp"

namespace fs = std::filesystem;
using namespace polyforge;

namespace {

struct Size {
  int width = 0;
  int height = 0;
};

Size parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw std::invalid_argument("size must look like 1024x1024");
  Size size;
  try {
    size.width = std::stoi(text.substr(0, x));
    size.height = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("size must look like 1024x1024");
  }
  if (size.width <= 0 || size.height <= 0) throw std::invalid_argument("size must be positive");
  return size;
}

GridLayout parse_layout(const std::string& text) {
  const Size s = parse_size(text);
  return GridLayout{s.height, s.width};  // RxC: rows first
}

void require_input(const std::string& path) {
  if (!fs::exists(path)) throw std::invalid_argument("input not found: " + path);
}

void require_inputs(const std::vector<std::string>& paths) {
  for (const auto& p : paths) require_input(p);
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::uint64_t seed = 0;
  std::string size = "512x512";
  std::string out_dir;
  std::string prefix = "scene";
  int roads = 6;
  int width_min = 13;
  int width_max = 24;
  int holes = 0;
  double curvature = 0.0;
  double boundary_noise = 0.0;
  double dropout = 0.0;
  double jitter = 0.0;
};

int run_synth(const SynthArgs& args) {
  const Size size = parse_size(args.size);
  SceneSpec spec;
  spec.seed = args.seed;
  spec.width = size.width;
  spec.height = size.height;
  spec.branch_count = args.roads;
  spec.road_width_min = args.width_min;
  spec.road_width_max = args.width_max;
  spec.hole_count = args.holes;
  spec.curvature = args.curvature;
  spec.degradation = {args.boundary_noise, args.dropout, args.jitter};
  const Scene scene = synth_scene(spec);

  fs::create_directories(args.out_dir);
  const std::string base = (fs::path(args.out_dir) / args.prefix).string();
  write_text_file(base + "_truth.geojson", polygonset_to_geojson(scene.truth));
  write_text_file(base + "_vertices.geojson", vertexset_to_geojson(scene.truth_vertices));
  write_mask_png(scene.mask, base + "_mask.png");
  write_heatmap_png(scene.heatmap, base + "_heatmap.png");
  write_mask_png(scene.degraded_mask, base + "_degraded_mask.png");
  write_heatmap_png(scene.degraded_heatmap, base + "_degraded_heatmap.png");
  std::printf("wrote %s_{truth,vertices}.geojson and 4 PNGs (%d polygons, %ld vertices)\n",
              base.c_str(), static_cast<int>(scene.truth.polygons.size()),
              scene.truth.total_vertices());
  return 0;
}

// --- rasterize / heatmap -----------------------------------------------------

int run_rasterize(const std::string& in, const std::string& size_text, const std::string& out) {
  require_input(in);
  PolygonSet set = polygonset_from_geojson(read_text_file(in));
  if (!size_text.empty()) {
    const Size size = parse_size(size_text);
    set.width = size.width;
    set.height = size.height;
  }
  if (set.width <= 0 || set.height <= 0) {
    throw std::invalid_argument("no grid size: pass --size or store grid_size in the GeoJSON");
  }
  write_mask_png(rasterize(set, set.width, set.height), out);
  return 0;
}

int run_heatmap(const std::string& in, const std::string& size_text, double sigma,
                const std::string& out) {
  require_input(in);
  const VertexSet vertices = vertices_from_geojson(read_text_file(in));
  Size size{0, 0};
  if (!size_text.empty()) {
    size = parse_size(size_text);
  } else {
    const PolygonSet probe = [&]() -> PolygonSet {
      try {
        return polygonset_from_geojson(read_text_file(in));
      } catch (const std::exception&) {
        return PolygonSet{};
      }
    }();
    size = {probe.width, probe.height};
  }
  if (size.width <= 0 || size.height <= 0) {
    throw std::invalid_argument("no grid size: pass --size or store grid_size in the GeoJSON");
  }
  write_heatmap_png(render_heatmap(vertices.locations(), size.width, size.height, sigma), out);
  return 0;
}

// --- polygonize ---------------------------------------------------------------

struct PolygonizeArgs {
  std::string mask;
  std::string heatmap;
  std::string vertices;
  std::vector<std::string> masks;
  std::vector<std::string> heatmaps;
  std::vector<std::string> vertex_files;
  std::string layout;
  std::string out;
  PolygonizeConfig config;
};

int run_polygonize(const PolygonizeArgs& args) {
  if (!args.mask.empty()) require_input(args.mask);
  if (!args.heatmap.empty()) require_input(args.heatmap);
  if (!args.vertices.empty()) require_input(args.vertices);
  require_inputs(args.masks);
  require_inputs(args.heatmaps);
  require_inputs(args.vertex_files);
  PolygonizeResult result;
  if (!args.layout.empty()) {
    const GridLayout layout = parse_layout(args.layout);
    if (args.masks.empty()) throw std::invalid_argument("stitched mode needs --masks");
    std::vector<BinaryMask> masks;
    for (const auto& path : args.masks) masks.push_back(read_mask_png(path));
    std::vector<VertexSet> vertex_sets;
    if (!args.heatmaps.empty()) {
      if (args.heatmaps.size() != masks.size()) {
        throw std::invalid_argument("--masks and --heatmaps counts differ");
      }
      for (const auto& path : args.heatmaps) {
        vertex_sets.push_back(nms_peaks(read_heatmap_png(path), args.config.nms_threshold,
                                        args.config.nms_window));
      }
    } else if (!args.vertex_files.empty()) {
      if (args.vertex_files.size() != masks.size()) {
        throw std::invalid_argument("--masks and --vertices counts differ");
      }
      for (const auto& path : args.vertex_files) {
        vertex_sets.push_back(vertexset_from_geojson(read_text_file(path)));
      }
    } else {
      throw std::invalid_argument("stitched mode needs --heatmaps or --vertices");
    }
    result = polygonize_stitched(masks, vertex_sets, layout, args.config);
  } else {
    if (args.mask.empty()) throw std::invalid_argument("--mask is required");
    const BinaryMask mask = read_mask_png(args.mask);
    if (!args.heatmap.empty()) {
      result = polygonize(mask, read_heatmap_png(args.heatmap), args.config);
    } else if (!args.vertices.empty()) {
      result = polygonize_with_vertices(
          mask, vertexset_from_geojson(read_text_file(args.vertices)), args.config);
    } else {
      throw std::invalid_argument("pass --heatmap or --vertices");
    }
  }
  write_text_file(args.out, polygonset_to_geojson(result.polygons,
                                                  &result.stats.dropped_rings_per_polygon));
  std::printf("%d polygons, %ld vertices, %d dropped regions, %d dropped holes\n",
              static_cast<int>(result.polygons.polygons.size()),
              result.polygons.total_vertices(), result.stats.dropped_regions,
              result.stats.dropped_holes);
  return 0;
}

// --- evaluate -----------------------------------------------------------------

struct EvaluateArgs {
  std::string pred;
  std::string truth;
  std::string size;
  std::string sf_params;
  double band_dist = 0.0;
  double scr_turn = 30.0;
  double snap_radius = 25.0;
  bool symmetric_apls = false;
  int jobs = 1;
  std::string out;
  std::string csv;
};

std::map<std::string, fs::path> geojson_files(const fs::path& dir) {
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".geojson") {
      files[entry.path().stem().string()] = entry.path();
    }
  }
  return files;
}

int run_evaluate(const EvaluateArgs& args) {
  require_input(args.pred);
  require_input(args.truth);
  if (!args.sf_params.empty()) require_input(args.sf_params);
  EvalConfig config;
  config.band_distance = args.band_dist;
  config.scr_turn_threshold = args.scr_turn;
  config.apls_snap_radius = args.snap_radius;
  config.apls_symmetric = args.symmetric_apls;
  if (!args.sf_params.empty()) {
    config.sf = sf_params_from_json(read_text_file(args.sf_params));
  }

  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
  if (fs::is_directory(args.pred) != fs::is_directory(args.truth)) {
    throw std::invalid_argument("--pred and --truth must both be files or both directories");
  }
  if (fs::is_directory(args.pred)) {
    const auto preds = geojson_files(args.pred);
    const auto truths = geojson_files(args.truth);
    for (const auto& [stem, path] : preds) {
      const auto it = truths.find(stem);
      if (it != truths.end()) pairs.push_back({stem, {path, it->second}});
    }
    if (pairs.empty()) throw std::invalid_argument("no matching .geojson stems in the two directories");
  } else {
    pairs.push_back({fs::path(args.pred).stem().string(), {args.pred, args.truth}});
  }

  Size forced{0, 0};
  if (!args.size.empty()) forced = parse_size(args.size);

  EvalReport report;
  report.images.resize(pairs.size());
  std::mutex fail_mutex;
  std::string failure;
  parallel_for_indexed(pairs.size(), args.jobs, [&](std::size_t i) {
    try {
      PolygonSet pred = polygonset_from_geojson(read_text_file(pairs[i].second.first.string()));
      PolygonSet truth = polygonset_from_geojson(read_text_file(pairs[i].second.second.string()));
      if (forced.width > 0) {
        pred.width = truth.width = forced.width;
        pred.height = truth.height = forced.height;
      }
      report.images[i] = {pairs[i].first, evaluate(pred, truth, config)};
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(fail_mutex);
      if (failure.empty()) failure = pairs[i].first + ": " + e.what();
    }
  });
  if (!failure.empty()) throw std::invalid_argument(failure);

  write_text_file(args.out, report_to_json(report));
  if (!args.csv.empty()) write_text_file(args.csv, report_to_csv(report));
  const AggregateEval agg = report.aggregate();
  std::printf("%d image(s): iou=%.4f b_iou=%.4f c_iou=%.4f n_ratio=%.4f polis=%.4f",
              agg.images, agg.iou, agg.b_iou, agg.c_iou, agg.n_ratio, agg.polis);
  if (agg.s_iou) std::printf(" s_iou=%.4f", *agg.s_iou);
  if (agg.scr) std::printf(" scr=%.4f", *agg.scr);
  if (agg.apls) std::printf(" apls=%.4f", *agg.apls);
  std::printf("\n");
  return 0;
}

// --- fit-sf ---------------------------------------------------------------------

int run_fit_sf(const std::vector<std::string>& inputs, double k, const std::string& out) {
  require_inputs(inputs);
  std::vector<double> counts;
  for (const std::string& path : inputs) {
    const PolygonSet set = polygonset_from_geojson(read_text_file(path));
    for (const auto& poly : set.polygons) {
      long n = static_cast<long>(poly.exterior.size());
      for (const Ring& hole : poly.holes) n += static_cast<long>(hole.size());
      counts.push_back(static_cast<double>(n));
    }
  }
  if (counts.size() < 2) throw std::invalid_argument("need at least 2 polygons to fit");
  const LogNormalFit fit = fit_lognormal(counts);
  const SfParams params = make_sf_params(k, fit);
  write_text_file(out, sf_params_to_json(params));
  std::printf("fit %zu polygons: mu=%.4f sigma=%.4f thresholds=(%.2f, %.2f, %.2f)\n",
              counts.size(), fit.mu, fit.sigma, params.n1, params.n2, params.n3);
  return 0;
}

// --- stitch / prep ----------------------------------------------------------------

int run_stitch(const std::vector<std::string>& inputs, const std::string& layout_text,
               const std::string& out) {
  if (inputs.empty()) throw std::invalid_argument("no input patches");
  require_inputs(inputs);
  const GridLayout layout = parse_layout(layout_text);
  const int depth = png_bit_depth(inputs.front());
  if (depth == 16) {
    std::vector<Heatmap> patches;
    for (const auto& path : inputs) patches.push_back(read_heatmap_png(path));
    write_heatmap_png(stitch_heatmaps(patches, layout), out);
  } else {
    std::vector<BinaryMask> patches;
    for (const auto& path : inputs) patches.push_back(read_mask_png(path));
    write_mask_png(stitch_masks(patches, layout), out);
  }
  return 0;
}

int run_prep(const std::string& in, int downsample, int tile_size, const std::string& out_dir,
             const std::string& prefix) {
  require_input(in);
  fs::create_directories(out_dir);
  const int depth = png_bit_depth(in);
  int rows = 0, cols = 0;
  if (depth == 16) {
    Heatmap map = read_heatmap_png(in);
    if (downsample > 0) map = downsample_heatmap(map, downsample, downsample);
    const auto patches = tile(map, tile_size);
    cols = map.width / tile_size;
    rows = map.height / tile_size;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const std::string name = prefix + "_r" + std::to_string(r) + "_c" + std::to_string(c) + ".png";
        write_heatmap_png(patches[static_cast<std::size_t>(r) * cols + c],
                          (fs::path(out_dir) / name).string());
      }
    }
  } else {
    BinaryMask mask = read_mask_png(in);
    if (downsample > 0) mask = downsample_mask(mask, downsample, downsample);
    const auto patches = tile(mask, tile_size);
    cols = mask.width / tile_size;
    rows = mask.height / tile_size;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const std::string name = prefix + "_r" + std::to_string(r) + "_c" + std::to_string(c) + ".png";
        write_mask_png(patches[static_cast<std::size_t>(r) * cols + c],
                       (fs::path(out_dir) / name).string());
      }
    }
  }
  std::printf("%d patches (%dx%d layout) in %s\n", rows * cols, rows, cols, out_dir.c_str());
  return 0;
}

}  // namespace

namespace {

int run_cli(int argc, char** argv) {
  CLI::App app{"raster-to-vector road polygon toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from an INI file");
  app.fallthrough();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic road scene");
  synth->add_option("--seed", synth_args.seed);
  synth->add_option("--size", synth_args.size, "grid size WxH");
  synth->add_option("--out-dir", synth_args.out_dir)->required();
  synth->add_option("--prefix", synth_args.prefix);
  synth->add_option("--roads", synth_args.roads, "number of road strips");
  synth->add_option("--width-min", synth_args.width_min);
  synth->add_option("--width-max", synth_args.width_max);
  synth->add_option("--holes", synth_args.holes, "carved traffic islands");
  synth->add_option("--curvature", synth_args.curvature, "corner chamfer probability");
  synth->add_option("--boundary-noise", synth_args.boundary_noise, "mask boundary jitter in px");
  synth->add_option("--dropout", synth_args.dropout, "vertex dropout probability");
  synth->add_option("--jitter", synth_args.jitter, "vertex jitter radius in px");

  std::string raster_in, raster_size, raster_out;
  auto* raster = app.add_subcommand("rasterize", "polygons GeoJSON -> 8-bit mask PNG");
  raster->add_option("--in", raster_in)->required();
  raster->add_option("--size", raster_size, "grid size WxH (default: grid_size member)");
  raster->add_option("--out", raster_out)->required();

  std::string heat_in, heat_size, heat_out;
  double heat_sigma = 5.0;
  auto* heat = app.add_subcommand("heatmap", "vertices GeoJSON -> 16-bit heatmap PNG");
  heat->add_option("--in", heat_in)->required();
  heat->add_option("--size", heat_size);
  heat->add_option("--sigma", heat_sigma);
  heat->add_option("--out", heat_out)->required();

  PolygonizeArgs poly_args;
  auto* poly = app.add_subcommand("polygonize", "mask + vertex heatmap -> road polygons");
  poly->add_option("--mask", poly_args.mask);
  poly->add_option("--heatmap", poly_args.heatmap);
  poly->add_option("--vertices", poly_args.vertices, "vertex GeoJSON instead of a heatmap");
  poly->add_option("--masks", poly_args.masks, "row-major patch masks (stitched mode)");
  poly->add_option("--heatmaps", poly_args.heatmaps, "row-major patch heatmaps");
  poly->add_option("--vertex-files", poly_args.vertex_files, "row-major patch vertex GeoJSONs");
  poly->add_option("--layout", poly_args.layout, "patch layout RxC (stitched mode)");
  poly->add_option("--dth", poly_args.config.d_th, "keypoint capture distance");
  poly->add_option("--eps", poly_args.config.epsilon, "DP tolerance for inflection recovery");
  poly->add_option("--tau", poly_args.config.tau, "inflection band half-width (degrees)");
  poly->add_option("--nms-threshold", poly_args.config.nms_threshold);
  poly->add_option("--nms-window", poly_args.config.nms_window);
  poly->add_option("--out", poly_args.out)->required();

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "score predictions against ground truth");
  eval->add_option("--pred", eval_args.pred)->required();
  eval->add_option("--truth", eval_args.truth)->required();
  eval->add_option("--size", eval_args.size, "override grid size WxH");
  eval->add_option("--sf-params", eval_args.sf_params, "SfParams JSON for S-IoU");
  eval->add_option("--band-dist", eval_args.band_dist, "B-IoU band distance (default 2% of diagonal)");
  eval->add_option("--scr-turn", eval_args.scr_turn, "SCR turn threshold (degrees)");
  eval->add_option("--snap-radius", eval_args.snap_radius, "APLS node snap radius");
  eval->add_flag("--symmetric-apls", eval_args.symmetric_apls, "average APLS in both directions");
  eval->add_option("--jobs", eval_args.jobs, "worker threads for batch mode")
      ->envname("POLYFORGE_JOBS");
  eval->add_option("--out", eval_args.out)->required();
  eval->add_option("--csv", eval_args.csv, "also write a CSV report");

  std::vector<std::string> fit_inputs;
  double fit_k = 0.1;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit-sf", "fit log-normal vertex-count thresholds");
  fit->add_option("--in", fit_inputs, "truth GeoJSON file(s)")->required();
  fit->add_option("--k", fit_k, "decay rate");
  fit->add_option("--out", fit_out)->required();

  std::vector<std::string> stitch_inputs;
  std::string stitch_layout, stitch_out;
  auto* stitch = app.add_subcommand("stitch", "assemble row-major PNG patches");
  stitch->add_option("--in", stitch_inputs, "patch PNGs, row-major")->required();
  stitch->add_option("--layout", stitch_layout, "RxC")->required();
  stitch->add_option("--out", stitch_out)->required();

  std::string prep_in, prep_out_dir, prep_prefix = "tile";
  int prep_down = 1024, prep_tile = 256;
  auto* prep = app.add_subcommand("prep", "downsample and tile a large PNG");
  prep->add_option("--in", prep_in)->required();
  prep->add_option("--downsample", prep_down, "target side length (0 = keep)");
  prep->add_option("--tile", prep_tile, "patch side length");
  prep->add_option("--out-dir", prep_out_dir)->required();
  prep->add_option("--prefix", prep_prefix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (raster->parsed()) return run_rasterize(raster_in, raster_size, raster_out);
    if (heat->parsed()) return run_heatmap(heat_in, heat_size, heat_sigma, heat_out);
    if (poly->parsed()) return run_polygonize(poly_args);
    if (eval->parsed()) return run_evaluate(eval_args);
    if (fit->parsed()) return run_fit_sf(fit_inputs, fit_k, fit_out);
    if (stitch->parsed()) return run_stitch(stitch_inputs, stitch_layout, stitch_out);
    if (prep->parsed()) return run_prep(prep_in, prep_down, prep_tile, prep_out_dir, prep_prefix);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (...) {
    std::fprintf(stderr, "error: unknown failure\n");
    return 3;
  }
}
