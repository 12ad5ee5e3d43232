#include "polyforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "polyforge/apls.hpp"

namespace polyforge {

namespace {

double segment_distance(Point p, Point a, Point b) {
  const double ux = b.x - a.x, uy = b.y - a.y;
  const double len2 = ux * ux + uy * uy;
  if (len2 <= 0.0) return distance(p, a);
  double t = ((p.x - a.x) * ux + (p.y - a.y) * uy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const Point proj{a.x + t * ux, a.y + t * uy};
  return distance(p, proj);
}

double point_to_outline(Point p, const PolygonWithHoles& poly) {
  double best = std::numeric_limits<double>::infinity();
  auto scan = [&](const Ring& ring) {
    const auto& pts = ring.points();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      best = std::min(best, segment_distance(p, pts[i], pts[(i + 1) % n]));
    }
  };
  scan(poly.exterior);
  for (const Ring& hole : poly.holes) scan(hole);
  return best;
}

double mean_vertex_to_outline(const PolygonWithHoles& from, const PolygonWithHoles& to) {
  double sum = 0.0;
  long count = 0;
  auto scan = [&](const Ring& ring) {
    for (const Point& p : ring.points()) {
      sum += point_to_outline(p, to);
      ++count;
    }
  };
  scan(from.exterior);
  for (const Ring& hole : from.holes) scan(hole);
  return sum / static_cast<double>(count);
}

}  // namespace

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("iou: mask dimensions differ");
  }
  long long inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    inter += a.data[i] & b.data[i];
    uni += a.data[i] | b.data[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double boundary_iou(const BinaryMask& a, const BinaryMask& b, double band_distance) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("boundary_iou: mask dimensions differ");
  }
  if (!(band_distance > 0.0)) throw std::invalid_argument("boundary_iou: d must be > 0");
  BinaryMask band_a = boundary_band(a, band_distance);
  BinaryMask band_b = boundary_band(b, band_distance);
  for (std::size_t i = 0; i < band_a.data.size(); ++i) {
    band_a.data[i] &= a.data[i];
    band_b.data[i] &= b.data[i];
  }
  return iou(band_a, band_b);
}

double c_iou(double iou_value, long n_gt, long n_pred) {
  if (n_gt < 3 || n_pred < 3) throw std::invalid_argument("c_iou: vertex counts must be >= 3");
  if (!(iou_value >= 0.0 && iou_value <= 1.0)) {
    throw std::invalid_argument("c_iou: iou must be in [0, 1]");
  }
  const double penalty =
      1.0 - static_cast<double>(std::labs(n_gt - n_pred)) / static_cast<double>(n_gt + n_pred);
  return iou_value * penalty;
}

double polis(const PolygonWithHoles& a, const PolygonWithHoles& b) {
  return 0.5 * mean_vertex_to_outline(a, b) + 0.5 * mean_vertex_to_outline(b, a);
}

LogNormalFit fit_lognormal(std::span<const double> counts) {
  if (counts.size() < 2) throw std::invalid_argument("fit_lognormal: need at least 2 counts");
  for (double c : counts) {
    if (!(c >= 1.0)) throw std::invalid_argument("fit_lognormal: counts must be >= 1");
  }
  double sum = 0.0;
  for (double c : counts) sum += std::log(c);
  const double mu = sum / static_cast<double>(counts.size());
  double var = 0.0;
  for (double c : counts) {
    const double d = std::log(c) - mu;
    var += d * d;
  }
  var /= static_cast<double>(counts.size());
  return {mu, std::sqrt(var)};
}

std::array<double, 3> sf_thresholds(const LogNormalFit& fit) {
  return {std::exp(fit.mu + fit.sigma), std::exp(fit.mu + 2.0 * fit.sigma),
          std::exp(fit.mu + 3.0 * fit.sigma)};
}

void SfParams::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("SfParams: k must be > 0");
  if (!(n1 > 3.0 && n2 > n1 && n3 > n2)) {
    throw std::invalid_argument("SfParams: thresholds must be strictly increasing and > 3");
  }
}

SfParams make_sf_params(double k, const LogNormalFit& fit) {
  const auto t = sf_thresholds(fit);
  SfParams params{k, t[0], t[1], t[2]};
  params.validate();
  return params;
}

double simplicity_factor(long n, const SfParams& params) {
  if (n < 3) throw std::invalid_argument("simplicity_factor: n must be >= 3");
  params.validate();
  const double nn = static_cast<double>(n);
  double sum = 0.0;
  for (double t : {params.n1, params.n2, params.n3}) {
    sum += (1.0 + std::exp(params.k * (3.0 - t))) / (1.0 + std::exp(params.k * (nn - t)));
  }
  return sum / 3.0;
}

double s_iou(double iou_value, long n, const SfParams& params) {
  return iou_value * simplicity_factor(n, params);
}

long count_inflections(const PolygonSet& polygons, double turn_threshold) {
  long count = 0;
  auto scan = [&](const Ring& ring) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (turn_deviation(ring, i) > turn_threshold) ++count;
    }
  };
  for (const PolygonWithHoles& poly : polygons.polygons) {
    scan(poly.exterior);
    for (const Ring& hole : poly.holes) scan(hole);
  }
  return count;
}

double scr(const PolygonSet& pred, const PolygonSet& truth, double turn_threshold) {
  const long truth_count = count_inflections(truth, turn_threshold);
  if (truth_count == 0) throw std::invalid_argument("SCR undefined: smooth ground truth");
  const long pred_count = count_inflections(pred, turn_threshold);
  return static_cast<double>(pred_count) / static_cast<double>(truth_count);
}

namespace {

struct OverlapMatch {
  std::vector<int> pred_to_truth;  // -1 when unmatched
  std::vector<int> truth_to_pred;
};

// Greedy one-to-one matching by rasterized overlap area.
OverlapMatch match_polygons(const PolygonSet& pred, const PolygonSet& truth, int w, int h) {
  const std::size_t np = pred.polygons.size();
  const std::size_t nt = truth.polygons.size();
  std::vector<BinaryMask> pred_masks, truth_masks;
  pred_masks.reserve(np);
  truth_masks.reserve(nt);
  for (const PolygonWithHoles& p : pred.polygons) {
    PolygonSet one;
    one.polygons.push_back(p);
    pred_masks.push_back(rasterize(one, w, h));
  }
  for (const PolygonWithHoles& t : truth.polygons) {
    PolygonSet one;
    one.polygons.push_back(t);
    truth_masks.push_back(rasterize(one, w, h));
  }
  struct Cand {
    long long overlap;
    std::size_t p, t;
  };
  std::vector<Cand> cands;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t t = 0; t < nt; ++t) {
      long long overlap = 0;
      for (std::size_t i = 0; i < pred_masks[p].data.size(); ++i) {
        overlap += pred_masks[p].data[i] & truth_masks[t].data[i];
      }
      if (overlap > 0) cands.push_back({overlap, p, t});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.p != b.p) return a.p < b.p;
    return a.t < b.t;
  });
  OverlapMatch match;
  match.pred_to_truth.assign(np, -1);
  match.truth_to_pred.assign(nt, -1);
  for (const Cand& c : cands) {
    if (match.pred_to_truth[c.p] >= 0 || match.truth_to_pred[c.t] >= 0) continue;
    match.pred_to_truth[c.p] = static_cast<int>(c.t);
    match.truth_to_pred[c.t] = static_cast<int>(c.p);
  }
  return match;
}

}  // namespace

ImageEval evaluate(const PolygonSet& pred, const PolygonSet& truth, const EvalConfig& config) {
  if (truth.polygons.empty()) {
    throw std::invalid_argument(
        "evaluate: empty truth; iou, b_iou, c_iou, n_ratio, polis, s_iou, scr and apls are "
        "undefined");
  }
  int w = truth.width, h = truth.height;
  if (w <= 0 || h <= 0) {
    w = pred.width;
    h = pred.height;
  }
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("evaluate: no grid dimensions available");
  }
  if ((pred.width > 0 && pred.width != w) || (pred.height > 0 && pred.height != h)) {
    throw std::invalid_argument("evaluate: pred and truth grids differ");
  }

  ImageEval out;
  const BinaryMask pred_mask = rasterize(pred, w, h);
  const BinaryMask truth_mask = rasterize(truth, w, h);
  out.iou = iou(pred_mask, truth_mask);

  double band = config.band_distance;
  if (!(band > 0.0)) {
    band = 0.02 * std::hypot(static_cast<double>(w), static_cast<double>(h));
  }
  out.b_iou = boundary_iou(pred_mask, truth_mask, band);

  out.n_pred = pred.total_vertices();
  out.n_gt = truth.total_vertices();
  out.n_ratio = out.n_gt > 0 ? static_cast<double>(out.n_pred) / static_cast<double>(out.n_gt)
                             : 0.0;
  if (out.n_pred >= 3 && out.n_gt >= 3) {
    out.c_iou = c_iou(out.iou, out.n_gt, out.n_pred);
  } else {
    out.notes.push_back("c_iou: fewer than 3 vertices on one side");
  }

  // PoLiS over overlap-matched polygon pairs.
  const OverlapMatch match = match_polygons(pred, truth, w, h);
  double polis_sum = 0.0;
  int polis_pairs = 0;
  for (std::size_t p = 0; p < pred.polygons.size(); ++p) {
    const int t = match.pred_to_truth[p];
    if (t < 0) {
      ++out.unmatched_pred;
      continue;
    }
    polis_sum += polis(pred.polygons[p], truth.polygons[static_cast<std::size_t>(t)]);
    ++polis_pairs;
  }
  for (int t : match.truth_to_pred) {
    if (t < 0) ++out.unmatched_truth;
  }
  if (polis_pairs > 0) {
    out.polis = polis_sum / polis_pairs;
  } else {
    out.notes.push_back("polis: no overlapping polygon pairs");
    out.polis = std::numeric_limits<double>::infinity();
  }

  if (config.sf) {
    if (out.n_pred >= 3) {
      out.sf = simplicity_factor(out.n_pred, *config.sf);
      out.s_iou = out.iou * *out.sf;
    } else {
      out.notes.push_back("sf: prediction has fewer than 3 vertices");
    }
  }

  const long truth_inflections = count_inflections(truth, config.scr_turn_threshold);
  if (truth_inflections > 0) {
    out.scr = scr(pred, truth, config.scr_turn_threshold);
  } else {
    out.notes.push_back("scr: smooth ground truth (no inflection points)");
  }

  try {
    const RoadGraph truth_graph = skeleton_to_graph(skeletonize(truth_mask));
    const RoadGraph pred_graph = skeleton_to_graph(skeletonize(pred_mask));
    out.apls = config.apls_symmetric
                   ? apls_symmetric(truth_graph, pred_graph, config.apls_snap_radius)
                   : apls_score(truth_graph, pred_graph, config.apls_snap_radius);
  } catch (const std::invalid_argument& e) {
    out.notes.push_back(std::string("apls: ") + e.what());
  }

  return out;
}

AggregateEval EvalReport::aggregate() const {
  AggregateEval agg;
  agg.images = static_cast<int>(images.size());
  if (images.empty()) return agg;
  double s_iou_sum = 0.0, sf_sum = 0.0, scr_sum = 0.0, apls_sum = 0.0;
  int s_iou_n = 0, sf_n = 0, scr_n = 0, apls_n = 0;
  for (const auto& [name, rec] : images) {
    agg.iou += rec.iou;
    agg.b_iou += rec.b_iou;
    agg.c_iou += rec.c_iou;
    agg.n_ratio += rec.n_ratio;
    agg.polis += rec.polis;
    agg.n_pred += static_cast<double>(rec.n_pred);
    agg.n_gt += static_cast<double>(rec.n_gt);
    agg.unmatched_pred += rec.unmatched_pred;
    agg.unmatched_truth += rec.unmatched_truth;
    if (rec.s_iou) {
      s_iou_sum += *rec.s_iou;
      ++s_iou_n;
    }
    if (rec.sf) {
      sf_sum += *rec.sf;
      ++sf_n;
    }
    if (rec.scr) {
      scr_sum += *rec.scr;
      ++scr_n;
    }
    if (rec.apls) {
      apls_sum += *rec.apls;
      ++apls_n;
    }
  }
  const double n = static_cast<double>(images.size());
  agg.iou /= n;
  agg.b_iou /= n;
  agg.c_iou /= n;
  agg.n_ratio /= n;
  agg.polis /= n;
  agg.n_pred /= n;
  agg.n_gt /= n;
  if (s_iou_n > 0) agg.s_iou = s_iou_sum / s_iou_n;
  if (sf_n > 0) agg.sf = sf_sum / sf_n;
  if (scr_n > 0) agg.scr = scr_sum / scr_n;
  if (apls_n > 0) agg.apls = apls_sum / apls_n;
  return agg;
}

}  // namespace polyforge
