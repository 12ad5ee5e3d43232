#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyforge/geometry.hpp"
#include "polyforge/raster.hpp"

namespace polyforge {

/// Intersection over union of two equal-size masks; 1 when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

/// IoU restricted to the boundary bands: each side is intersected with
/// its own band of pixels within `band_distance` of its boundary.
double boundary_iou(const BinaryMask& a, const BinaryMask& b, double band_distance);

/// Vertex-count-penalized IoU: iou * (1 - |n_gt - n_pred| / (n_gt + n_pred)).
double c_iou(double iou_value, long n_gt, long n_pred);

/// Symmetric average vertex-to-outline distance in pixels: half the mean
/// distance from a's vertices to b's outline plus half the reverse.
/// Outlines and vertex lists include hole rings.
double polis(const PolygonWithHoles& a, const PolygonWithHoles& b);

struct LogNormalFit {
  double mu = 0.0;     ///< mean of ln(count)
  double sigma = 0.0;  ///< population (maximum-likelihood) std of ln(count)
};

/// Maximum-likelihood log-normal fit. Requires at least two values, all >= 1.
LogNormalFit fit_lognormal(std::span<const double> counts);

/// Interval upper bounds exp(mu + i * sigma) for i = 1, 2, 3.
std::array<double, 3> sf_thresholds(const LogNormalFit& fit);

/// Simplicity-factor parameters: decay rate and the three vertex-count
/// thresholds (valid when strictly increasing and all above 3).
struct SfParams {
  double k = 0.1;
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = 0.0;

  void validate() const;
};

SfParams make_sf_params(double k, const LogNormalFit& fit);

/// Mean of the three sigmoid penalty terms
/// (1 + e^{k(3 - Ni)}) / (1 + e^{k(n - Ni)}); equals 1 exactly at n = 3,
/// strictly decreasing in n, asymptotically 0.
double simplicity_factor(long n, const SfParams& params);

/// iou * simplicity_factor(n).
double s_iou(double iou_value, long n, const SfParams& params);

/// Number of vertices over all rings whose turn deviation |180 - theta|
/// strictly exceeds turn_threshold degrees.
long count_inflections(const PolygonSet& polygons, double turn_threshold);

/// Ratio of predicted to ground-truth inflection counts. Throws when the
/// ground truth has no inflection points.
double scr(const PolygonSet& pred, const PolygonSet& truth, double turn_threshold = 30.0);

struct EvalConfig {
  std::optional<SfParams> sf;      ///< required for s_iou / sf fields
  double band_distance = 0.0;      ///< <= 0 selects 0.02 x image diagonal
  double scr_turn_threshold = 30.0;
  double apls_snap_radius = 25.0;
  bool apls_symmetric = false;
};

/// One image's metric record. Optional fields stay empty when their
/// metric is undefined for the input (noted in `notes`).
struct ImageEval {
  double iou = 0.0;
  double b_iou = 0.0;
  double c_iou = 0.0;
  double n_ratio = 0.0;
  double polis = 0.0;
  std::optional<double> s_iou;
  std::optional<double> sf;
  std::optional<double> scr;
  std::optional<double> apls;
  long n_pred = 0;
  long n_gt = 0;
  int unmatched_pred = 0;  ///< predicted polygons with no overlapping truth polygon
  int unmatched_truth = 0; ///< truth polygons with no overlapping prediction
  std::vector<std::string> notes;
};

/// Rasterizes both sides on the shared grid and computes the full metric
/// suite. PoLiS is averaged over polygon pairs matched greedily by
/// rasterized overlap area; unmatched polygons are excluded from PoLiS
/// and counted. Throws on empty truth or mismatched grids.
ImageEval evaluate(const PolygonSet& pred, const PolygonSet& truth,
                   const EvalConfig& config = {});

/// Aggregate means over the per-image records (optional metrics average
/// over the images where they are defined).
struct AggregateEval {
  double iou = 0.0, b_iou = 0.0, c_iou = 0.0, n_ratio = 0.0, polis = 0.0;
  std::optional<double> s_iou, sf, scr, apls;
  double n_pred = 0.0, n_gt = 0.0;
  int unmatched_pred = 0, unmatched_truth = 0;
  int images = 0;
};

struct EvalReport {
  std::vector<std::pair<std::string, ImageEval>> images;

  AggregateEval aggregate() const;
};

}  // namespace polyforge
