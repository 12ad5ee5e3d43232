#include "polyforge/apls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace polyforge {

namespace {

constexpr double kSqrt2 = 1.41421356237309514547;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct PixelGraph {
  std::vector<int> px, py;            // pixel coordinates per vertex
  std::vector<std::vector<int>> adj;  // neighbour vertex ids
};

// Dijkstra over an adjacency list with explicit edge weights.
std::vector<double> dijkstra(int source, int node_count,
                             const std::vector<std::vector<std::pair<int, double>>>& adj) {
  std::vector<double> dist(node_count, kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::vector<std::vector<std::pair<int, double>>> adjacency(const RoadGraph& graph) {
  std::vector<std::vector<std::pair<int, double>>> adj(graph.nodes.size());
  for (const GraphEdge& e : graph.edges) {
    if (e.a == e.b) continue;  // self-loops never shorten paths
    adj[e.a].emplace_back(e.b, e.length);
    adj[e.b].emplace_back(e.a, e.length);
  }
  return adj;
}

}  // namespace

RoadGraph skeleton_to_graph(const BinaryMask& skeleton) {
  RoadGraph graph;
  const int w = skeleton.width;
  const int h = skeleton.height;
  std::vector<int> vertex_at(static_cast<std::size_t>(w) * h, -1);
  PixelGraph pg;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!skeleton(x, y)) continue;
      vertex_at[static_cast<std::size_t>(y) * w + x] = static_cast<int>(pg.px.size());
      pg.px.push_back(x);
      pg.py.push_back(y);
    }
  }
  const int n = static_cast<int>(pg.px.size());
  if (n == 0) return graph;
  auto occupied = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h &&
           vertex_at[static_cast<std::size_t>(y) * w + x] >= 0;
  };
  // 8-connectivity minus redundant diagonals: a diagonal step is skipped
  // when an axial pixel bridges the same corner, which keeps junction
  // pixels from collapsing into micro-clusters.
  pg.adj.resize(n);
  for (int v = 0; v < n; ++v) {
    const int x = pg.px[v], y = pg.py[v];
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int nx = x + dx, ny = y + dy;
        if (!occupied(nx, ny)) continue;
        if (dx != 0 && dy != 0 && (occupied(x + dx, y) || occupied(x, y + dy))) continue;
        pg.adj[v].push_back(vertex_at[static_cast<std::size_t>(ny) * w + nx]);
      }
    }
  }

  // Keepers: pixels of degree != 2, plus one anchor per all-degree-2
  // component (pure cycle).
  std::vector<char> keep(n, 0);
  for (int v = 0; v < n; ++v) keep[v] = pg.adj[v].size() != 2;
  std::vector<char> seen(n, 0);
  for (int v = 0; v < n; ++v) {
    if (seen[v] || keep[v]) continue;
    // Flood the degree-2 component; promote v if no keeper is attached.
    std::vector<int> stack{v};
    std::vector<int> comp;
    seen[v] = 1;
    bool has_keeper = false;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int t : pg.adj[u]) {
        if (keep[t]) {
          has_keeper = true;
        } else if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
    if (!has_keeper) {
      keep[*std::min_element(comp.begin(), comp.end())] = 1;
    }
  }

  std::vector<int> node_id(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    node_id[v] = static_cast<int>(graph.nodes.size());
    graph.nodes.push_back(Point{static_cast<double>(pg.px[v]), static_cast<double>(pg.py[v])});
    graph.control.push_back(node_id[v]);
  }

  // Walk chains from each keeper; every chain is emitted exactly once by
  // consuming its interior pixels.
  auto step_len = [&](int a, int b) {
    return (pg.px[a] != pg.px[b] && pg.py[a] != pg.py[b]) ? kSqrt2 : 1.0;
  };
  std::vector<char> consumed(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    for (int t : pg.adj[v]) {
      if (keep[t]) {
        if (v < t) graph.edges.push_back({node_id[v], node_id[t], step_len(v, t)});
        continue;
      }
      if (consumed[t]) continue;
      // Walk through degree-2 pixels until the next keeper.
      double length = step_len(v, t);
      int prev = v;
      int cur = t;
      consumed[cur] = 1;
      while (!keep[cur]) {
        int next = -1;
        for (int u : pg.adj[cur]) {
          if (u != prev) {
            next = u;
            break;
          }
        }
        if (next < 0) break;  // dangling chain end (cannot happen on valid skeletons)
        length += step_len(cur, next);
        prev = cur;
        cur = next;
        if (!keep[cur]) {
          if (consumed[cur]) break;
          consumed[cur] = 1;
        }
      }
      if (keep[cur]) {
        graph.edges.push_back({node_id[v], node_id[cur], length});
      }
    }
  }
  return graph;
}

std::vector<std::optional<int>> match_nodes(const RoadGraph& truth, const RoadGraph& pred,
                                            double snap_radius) {
  if (!(snap_radius > 0.0)) throw std::invalid_argument("match_nodes: snap_radius must be > 0");
  std::vector<std::optional<int>> out(truth.control.size());
  const double r2 = snap_radius * snap_radius;
  for (std::size_t i = 0; i < truth.control.size(); ++i) {
    const Point& p = truth.nodes[truth.control[i]];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pred.nodes.size(); ++j) {
      const double d2 = distance_sq(p, pred.nodes[j]);
      if (d2 <= r2 && d2 < best) {
        best = d2;
        out[i] = static_cast<int>(j);
      }
    }
  }
  return out;
}

double apls_score(const RoadGraph& truth, const RoadGraph& pred, double snap_radius) {
  if (truth.control.size() < 2) throw std::invalid_argument("APLS undefined: fewer than 2 control nodes");
  const auto truth_adj = adjacency(truth);
  const auto pred_adj = adjacency(pred);
  const auto matched = match_nodes(truth, pred, snap_radius);

  const std::size_t c = truth.control.size();
  std::vector<std::vector<double>> truth_dist(c);
  for (std::size_t i = 0; i < c; ++i) {
    truth_dist[i] = dijkstra(truth.control[i], static_cast<int>(truth.nodes.size()), truth_adj);
  }
  // Dijkstra once per distinct matched pred node.
  std::vector<std::vector<double>> pred_dist(c);
  std::vector<std::pair<int, std::size_t>> cache;  // pred node -> index into pred_dist
  for (std::size_t i = 0; i < c; ++i) {
    if (!matched[i]) continue;
    const int node = *matched[i];
    auto it = std::find_if(cache.begin(), cache.end(),
                           [&](const auto& e) { return e.first == node; });
    if (it == cache.end()) {
      pred_dist[i] = dijkstra(node, static_cast<int>(pred.nodes.size()), pred_adj);
      cache.emplace_back(node, i);
    } else {
      pred_dist[i] = pred_dist[it->second];
    }
  }

  double sum = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      const double dg = truth_dist[i][truth.control[j]];
      if (!std::isfinite(dg)) continue;  // different truth components: skipped
      ++pairs;
      double term = 1.0;
      if (matched[i] && matched[j]) {
        const double dp = pred_dist[i][*matched[j]];
        if (std::isfinite(dp)) {
          term = std::min(std::abs(dg - dp) / dg, 1.0);
        }
      }
      sum += term;
    }
  }
  if (pairs == 0) throw std::invalid_argument("APLS undefined: no connected control pairs");
  return 1.0 - sum / static_cast<double>(pairs);
}

double apls_symmetric(const RoadGraph& truth, const RoadGraph& pred, double snap_radius) {
  return 0.5 * (apls_score(truth, pred, snap_radius) + apls_score(pred, truth, snap_radius));
}

}  // namespace polyforge
