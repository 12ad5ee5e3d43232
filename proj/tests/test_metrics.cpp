#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "polyforge/metrics.hpp"
#include "polyforge/synth.hpp"
#include "test_util.hpp"

using namespace polyforge;

namespace {

PolygonSet set_of(std::vector<PolygonWithHoles> polys, int w, int h) {
  PolygonSet set;
  set.polygons = std::move(polys);
  set.width = w;
  set.height = h;
  return set;
}

SfParams default_sf() { return SfParams{0.1, 20.0, 40.0, 80.0}; }

Ring insert_midpoints(const Ring& ring) {
  std::vector<Point> pts;
  const auto& p = ring.points();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point& a = p[i];
    const Point& b = p[(i + 1) % p.size()];
    pts.push_back(a);
    pts.push_back({(a.x + b.x) / 2.0, (a.y + b.y) / 2.0});
  }
  return Ring(std::move(pts));
}

}  // namespace

TEST_CASE("iou basics") {
  BinaryMask a(100, 100, 0), b(100, 100, 0);
  CHECK(iou(a, b) == 1.0);  // both empty
  for (int y = 20; y < 80; ++y)
    for (int x = 20; x < 80; ++x) a(x, y) = 1;
  CHECK(iou(a, a) == 1.0);
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) b(x, y) = 1;
  CHECK(iou(a, b) == doctest::Approx(0.36));
  BinaryMask c(100, 100, 0);
  c(0, 0) = 1;
  CHECK(iou(a, c) == 0.0);
  CHECK_THROWS_AS(iou(a, BinaryMask(50, 50)), std::invalid_argument);
}

TEST_CASE("boundary_iou identical, disjoint, and noise sensitivity") {
  BinaryMask a(120, 120, 0);
  for (int y = 30; y < 90; ++y)
    for (int x = 30; x < 90; ++x) a(x, y) = 1;
  CHECK(boundary_iou(a, a, 5.0) == 1.0);

  BinaryMask shifted(120, 120, 0);
  for (int y = 30; y < 90; ++y)
    for (int x = 30; x < 90; ++x) shifted(x, y) = 1;
  // Far-translated copy: bands cannot overlap.
  BinaryMask far(120, 120, 0);
  for (int y = 2; y < 14; ++y)
    for (int x = 2; x < 14; ++x) far(x, y) = 1;
  CHECK(boundary_iou(a, far, 3.0) == 0.0);

  // One-pixel boundary noise hurts the band metric more than plain IoU.
  std::mt19937_64 rng(64);
  BinaryMask noisy = a;
  for (int x = 30; x < 90; ++x) {
    if (rng() & 1) noisy(x, 29) = 1;  // bumps along the top edge
    if (rng() & 1) noisy(x, 90) = 1;
  }
  const double plain = iou(a, noisy);
  const double band = boundary_iou(a, noisy, 5.0);
  CHECK(band < plain);
}

TEST_CASE("c_iou formula and symmetry") {
  CHECK(c_iou(0.7, 12, 12) == doctest::Approx(0.7));
  CHECK(c_iou(0.8, 10, 30) == doctest::Approx(0.4));
  CHECK(c_iou(0.8, 30, 10) == doctest::Approx(0.4));
  CHECK_THROWS_AS(c_iou(0.5, 2, 10), std::invalid_argument);
  CHECK_THROWS_AS(c_iou(1.5, 10, 10), std::invalid_argument);
  std::mt19937_64 rng(15);
  for (int iter = 0; iter < 200; ++iter) {
    const long a = 3 + static_cast<long>(rng() % 400);
    const long b = 3 + static_cast<long>(rng() % 400);
    const double v = (rng() % 1000) / 1000.0;
    CHECK(c_iou(v, a, b) == doctest::Approx(c_iou(v, b, a)).epsilon(1e-15));
    CHECK(c_iou(v, a, a) == doctest::Approx(v).epsilon(1e-15));
  }
}

TEST_CASE("polis on canonical pairs") {
  const PolygonWithHoles unit(testutil::rect(0, 0, 1, 1));
  CHECK(polis(unit, unit) == doctest::Approx(0.0));
  // Unit squares offset by (0.5, 0): the two leading vertices of each
  // square lie exactly on the other outline (distance 0), the trailing
  // two are 0.5 away, so each direction averages 0.25.
  const PolygonWithHoles offset(testutil::rect(0.5, 0, 1.5, 1));
  CHECK(polis(unit, offset) == doctest::Approx(0.25));
  CHECK(polis(offset, unit) == doctest::Approx(0.25));
  // Disjoint unit squares with a 2 px gap: near vertices are 2 away,
  // far vertices 3, so each direction averages 2.5.
  const PolygonWithHoles apart(testutil::rect(3, 0, 4, 1));
  CHECK(polis(unit, apart) == doctest::Approx(2.5));
}

TEST_CASE("polis matches the brute-force oracle") {
  std::mt19937_64 rng(33);
  for (int iter = 0; iter < 40; ++iter) {
    const Ring a = testutil::random_simple_ring(rng, 6 + static_cast<int>(rng() % 8));
    const Ring b = testutil::random_simple_ring(rng, 6 + static_cast<int>(rng() % 8));
    const PolygonWithHoles pa(a), pb(b);
    const double got = polis(pa, pb);
    const double expected = oracle::polis_bruteforce(pa, pb);
    CHECK(std::abs(got - expected) < 1e-9);
    CHECK(polis(pb, pa) == doctest::Approx(got).epsilon(1e-12));
  }
}

TEST_CASE("polis is rigid-motion invariant") {
  std::mt19937_64 rng(44);
  const PolygonWithHoles a(testutil::random_simple_ring(rng, 9));
  const PolygonWithHoles b(testutil::random_simple_ring(rng, 7));
  const double base = polis(a, b);
  const double angle = 1.234;
  const double c = std::cos(angle), s = std::sin(angle);
  auto moved = [&](const PolygonWithHoles& poly) {
    std::vector<Point> pts;
    for (const Point& p : poly.exterior.points()) {
      pts.push_back({c * p.x - s * p.y + 17.0, s * p.x + c * p.y - 4.5});
    }
    return PolygonWithHoles(Ring(std::move(pts)));
  };
  CHECK(polis(moved(a), moved(b)) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("polis includes hole rings") {
  const PolygonWithHoles with_hole(testutil::rect(0, 0, 20, 20), {testutil::rect(8, 8, 12, 12)});
  const PolygonWithHoles without(testutil::rect(0, 0, 20, 20));
  CHECK(polis(with_hole, without) > 0.0);
  CHECK(polis(with_hole, with_hole) == doctest::Approx(0.0));
}

TEST_CASE("fit_lognormal closed forms") {
  const std::vector<double> constant{7.0, 7.0, 7.0, 7.0};
  const auto fit = fit_lognormal(constant);
  CHECK(fit.mu == doctest::Approx(std::log(7.0)));
  CHECK(fit.sigma == doctest::Approx(0.0));
  const auto t = sf_thresholds(fit);
  CHECK(t[0] == doctest::Approx(7.0));
  CHECK(t[2] == doctest::Approx(7.0));

  const std::vector<double> two{std::exp(1.0), std::exp(3.0)};
  const auto fit2 = fit_lognormal(two);
  CHECK(fit2.mu == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit2.sigma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sf_thresholds(fit2)[0] == doctest::Approx(std::exp(3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{2.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_lognormal(std::vector<double>{2.0, 0.5}), std::invalid_argument);
}

TEST_CASE("fit_lognormal recovers sampled parameters") {
  std::mt19937_64 rng(2718);
  std::lognormal_distribution<double> dist(2.0, 0.5);
  std::vector<double> counts;
  counts.reserve(20000);
  for (int i = 0; i < 20000; ++i) {
    counts.push_back(std::max(1.0, std::round(dist(rng))));
  }
  const auto fit = fit_lognormal(counts);
  CHECK(std::abs(fit.mu - 2.0) < 0.02);
  CHECK(std::abs(fit.sigma - 0.5) < 0.02);
}

TEST_CASE("simplicity_factor contract") {
  const SfParams params = default_sf();
  CHECK(simplicity_factor(3, params) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(simplicity_factor(1000000, params) < 1e-9);
  double prev = simplicity_factor(3, params);
  for (long n = 4; n <= 200; ++n) {
    const double cur = simplicity_factor(n, params);
    CHECK(cur < prev);
    CHECK(cur > 0.0);
    prev = cur;
  }
  CHECK_THROWS_AS(simplicity_factor(2, params), std::invalid_argument);
  CHECK_THROWS_AS(simplicity_factor(10, SfParams{0.1, 2.0, 4.0, 8.0}), std::invalid_argument);
}

TEST_CASE("simplicity_factor drops steepest near an isolated threshold") {
  // With thresholds separated by much more than the sigmoid width 1/k
  // the decline localizes at each threshold. (At spacings comparable to
  // 1/k, e.g. (20, 40, 80) with k = 0.1, the overlapping sigmoids move
  // the sharpest combined drop between thresholds.)
  const SfParams params{0.1, 40.0, 160.0, 400.0};
  double prev = simplicity_factor(3, params);
  double steepest_drop = 0.0;
  long steepest_at = 0;
  for (long n = 4; n <= 200; ++n) {
    const double cur = simplicity_factor(n, params);
    const double drop = prev - cur;
    if (drop > steepest_drop) {
      steepest_drop = drop;
      steepest_at = n;
    }
    prev = cur;
  }
  CHECK(std::abs(steepest_at - 40) <= 5);
}

TEST_CASE("s_iou products and bound") {
  const SfParams params = default_sf();
  CHECK(s_iou(1.0, 3, params) == doctest::Approx(1.0));
  const double sf40 = simplicity_factor(40, params);
  CHECK(s_iou(0.75, 40, params) == doctest::Approx(0.75 * sf40));
  std::mt19937_64 rng(10);
  for (int iter = 0; iter < 100; ++iter) {
    const long n = 3 + static_cast<long>(rng() % 300);
    const double v = (rng() % 1000) / 1000.0;
    CHECK(s_iou(v, n, params) <= v + 1e-15);
  }
}

TEST_CASE("scr on constructed geometries") {
  const PolygonSet square = set_of({PolygonWithHoles(testutil::rect(10, 10, 60, 60))}, 80, 80);
  CHECK(scr(square, square, 30.0) == doctest::Approx(1.0));

  // Each edge split by a 45-degree zigzag midpoint: every original corner
  // stays an inflection and each midpoint adds one -> ratio 2.
  const double bulge = 25.0 / 2.0;  // 45-degree kink on a 50 px edge
  PolygonSet zigzag = set_of(
      {PolygonWithHoles(Ring({{10, 10},
                              {35, 10 - bulge},
                              {60, 10},
                              {60 + bulge, 35},
                              {60, 60},
                              {35, 60 + bulge},
                              {10, 60},
                              {10 - bulge, 35}}))},
      100, 100);
  CHECK(scr(zigzag, square, 30.0) == doctest::Approx(2.0));

  // A regular octagon only turns 45 degrees per vertex.
  std::vector<Point> oct;
  for (int i = 0; i < 8; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * (i + 0.5) / 8;
    oct.push_back({40 + 30 * std::cos(a), 40 + 30 * std::sin(a)});
  }
  const PolygonSet octagon = set_of({PolygonWithHoles(Ring(oct))}, 80, 80);
  CHECK(scr(octagon, square, 50.0) == doctest::Approx(0.0));

  // Smooth ground truth has no inflections at a high threshold.
  CHECK_THROWS_AS(scr(square, octagon, 50.0), std::invalid_argument);
}

TEST_CASE("scr is scale invariant") {
  SceneSpec spec;
  spec.seed = 77;
  spec.width = spec.height = 256;
  spec.branch_count = 4;
  const Scene scene = synth_scene(spec);
  auto scale_set = [](const PolygonSet& in, double s) {
    PolygonSet out;
    out.width = static_cast<int>(in.width * s);
    out.height = static_cast<int>(in.height * s);
    for (const auto& poly : in.polygons) {
      std::vector<Point> ext;
      for (const Point& p : poly.exterior.points()) ext.push_back({p.x * s, p.y * s});
      std::vector<Ring> holes;
      for (const Ring& h : poly.holes) {
        std::vector<Point> hp;
        for (const Point& p : h.points()) hp.push_back({p.x * s, p.y * s});
        holes.emplace_back(std::move(hp));
      }
      out.polygons.emplace_back(Ring(std::move(ext)), std::move(holes));
    }
    return out;
  };
  const PolygonSet doubled = scale_set(scene.truth, 2.0);
  CHECK(count_inflections(doubled, 30.0) == count_inflections(scene.truth, 30.0));
}

TEST_CASE("evaluate is a fixed point on identical sets") {
  SceneSpec spec;
  spec.seed = 99;
  spec.width = spec.height = 320;
  spec.branch_count = 5;
  spec.hole_count = 1;
  const Scene scene = synth_scene(spec);
  EvalConfig config;
  config.sf = default_sf();
  const ImageEval rec = evaluate(scene.truth, scene.truth, config);
  CHECK(rec.iou == 1.0);
  CHECK(rec.b_iou == 1.0);
  CHECK(rec.c_iou == 1.0);
  CHECK(rec.n_ratio == 1.0);
  CHECK(rec.polis <= 1e-9);
  CHECK(rec.scr.value() == 1.0);
  CHECK(rec.apls.value() == 1.0);
  CHECK(rec.unmatched_pred == 0);
  CHECK(rec.unmatched_truth == 0);
}

TEST_CASE("evaluate on vertex-doubled prediction") {
  PolygonSet truth;
  truth.width = truth.height = 200;
  truth.polygons.emplace_back(testutil::rect(30, 30, 150, 120));
  PolygonSet doubled = truth;
  doubled.polygons[0] = PolygonWithHoles(insert_midpoints(truth.polygons[0].exterior));
  const ImageEval rec = evaluate(doubled, truth, {});
  CHECK(rec.iou == doctest::Approx(1.0));
  CHECK(rec.n_ratio == doctest::Approx(2.0));
  CHECK(rec.c_iou == doctest::Approx(2.0 / 3.0));
  CHECK(rec.polis <= 1e-9);
}

TEST_CASE("evaluate reports unmatched polygons") {
  PolygonSet truth;
  truth.width = truth.height = 220;
  truth.polygons.emplace_back(testutil::rect(10, 10, 80, 80));
  truth.polygons.emplace_back(testutil::rect(120, 120, 200, 200));
  PolygonSet pred;
  pred.width = pred.height = 220;
  pred.polygons.emplace_back(testutil::rect(10, 10, 80, 80));
  const ImageEval rec = evaluate(pred, truth, {});
  CHECK(rec.unmatched_truth == 1);
  CHECK(rec.unmatched_pred == 0);
  CHECK(rec.iou < 1.0);
}

TEST_CASE("evaluate matches polygons by largest rasterized overlap") {
  // One truth polygon, two overlapping predictions: PoLiS must pair the
  // truth with the larger-overlap prediction and report the other as
  // unmatched.
  PolygonSet truth;
  truth.width = truth.height = 128;
  truth.polygons.emplace_back(testutil::rect(20, 20, 100, 100));
  PolygonSet pred;
  pred.width = pred.height = 128;
  pred.polygons.emplace_back(testutil::rect(90, 90, 120, 120));  // small corner overlap
  pred.polygons.emplace_back(testutil::rect(21, 21, 99, 99));    // near-perfect match
  const ImageEval rec = evaluate(pred, truth, {});
  CHECK(rec.unmatched_pred == 1);
  CHECK(rec.unmatched_truth == 0);
  // PoLiS against the near-perfect prediction stays ~1 px; pairing with
  // the corner box would exceed 30 px.
  CHECK(rec.polis < 2.0);
}

TEST_CASE("evaluate rejects empty truth") {
  PolygonSet truth;
  truth.width = truth.height = 64;
  PolygonSet pred;
  pred.width = pred.height = 64;
  pred.polygons.emplace_back(testutil::rect(1, 1, 10, 10));
  CHECK_THROWS_WITH_AS(evaluate(pred, truth, {}),
                       doctest::Contains("undefined"), std::invalid_argument);
}

TEST_CASE("report aggregate averages records") {
  EvalReport report;
  ImageEval a;
  a.iou = 0.5;
  a.apls = 0.8;
  ImageEval b;
  b.iou = 1.0;  // apls undefined for b
  report.images.push_back({"a", a});
  report.images.push_back({"b", b});
  const AggregateEval agg = report.aggregate();
  CHECK(agg.iou == doctest::Approx(0.75));
  CHECK(agg.apls.value() == doctest::Approx(0.8));
  CHECK(agg.images == 2);
}
