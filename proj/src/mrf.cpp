#include "ifta/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace ifta {

namespace {

// Dinic max-flow on a small graph; doubles as capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  void add_edge(int u, int v, double cap_uv, double cap_vu = 0.0) {
    edges_.push_back({v, head_[u], cap_uv});
    head_[u] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, head_[v], cap_vu});
    head_[v] = static_cast<int>(edges_.size()) - 1;
  }

  double solve(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      double f;
      while ((f = dfs(s, t, std::numeric_limits<double>::infinity())) > 1e-15)
        flow += f;
    }
    return flow;
  }

  // After solve: true when node is on the source side of the min cut.
  bool source_side(int u) const { return level_[u] >= 0; }

 private:
  struct Edge {
    int to;
    int next;
    double cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 1e-15 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double pushed) {
    if (u == t) return pushed;
    for (int& e = it_[u]; e != -1; e = edges_[e].next) {
      Edge& ed = edges_[e];
      if (ed.cap > 1e-15 && level_[ed.to] == level_[u] + 1) {
        const double f = dfs(ed.to, t, std::min(pushed, ed.cap));
        if (f > 1e-15) {
          ed.cap -= f;
          edges_[e ^ 1].cap += f;
          return f;
        }
      }
    }
    return 0.0;
  }

  std::vector<int> head_, level_, it_;
  std::vector<Edge> edges_;
};

double potts_energy(std::span<const int> labels,
                    const std::vector<std::vector<double>>& data,
                    const NeighborGraph& graph, double beta) {
  double e = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) e += data[i][labels[i]];
  for (const auto& [i, j] : graph.edges)
    if (labels[i] != labels[j]) e += beta;
  return e;
}

}  // namespace

namespace {

// Uniform grid over point positions; cells are addressed by integer
// coordinates packed into one key. Turns the all-pairs spatial queries
// below into local searches.
class PointGrid {
 public:
  PointGrid(std::span<const FlowVector> vectors, double cell)
      : cell_(std::max(cell, 1e-9)) {
    for (int i = 0; i < static_cast<int>(vectors.size()); ++i)
      cells_[key(cx(vectors[i].x), cy(vectors[i].y))].push_back(i);
  }

  int cx(double x) const { return static_cast<int>(std::floor(x / cell_)); }
  int cy(double y) const { return static_cast<int>(std::floor(y / cell_)); }

  // Visit the indices in all cells of the square ring at Chebyshev
  // distance r around (cx0, cy0); r = 0 is the center cell itself.
  template <typename F>
  void visit_ring(int cx0, int cy0, int r, F&& f) const {
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
        const auto it = cells_.find(key(cx0 + dx, cy0 + dy));
        if (it == cells_.end()) continue;
        for (int j : it->second) f(j);
      }
  }

  double cell_size() const { return cell_; }

 private:
  static long long key(int cx, int cy) {
    return (static_cast<long long>(cx) << 32) ^
           static_cast<long long>(static_cast<unsigned int>(cy));
  }
  double cell_;
  std::unordered_map<long long, std::vector<int>> cells_;
};

}  // namespace

double median_nn_distance(std::span<const FlowVector> vectors) {
  const int n = static_cast<int>(vectors.size());
  if (n < 2) return 0.0;

  // Cell size near the expected spacing keeps ring searches short.
  double min_x = vectors[0].x, max_x = min_x, min_y = vectors[0].y,
         max_y = min_y;
  for (const auto& v : vectors) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  const double span =
      std::max({max_x - min_x, max_y - min_y, 1e-6});
  const PointGrid grid(vectors, span / std::sqrt(static_cast<double>(n)));

  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i) {
    const int cx = grid.cx(vectors[i].x), cy = grid.cy(vectors[i].y);
    for (int r = 0;; ++r) {
      // Once every point of this ring is farther than the best found so
      // far, no later ring can improve it.
      if (r > 0 && (r - 1) * grid.cell_size() > nn[i]) break;
      bool any = false;
      grid.visit_ring(cx, cy, r, [&](int j) {
        any = true;
        if (j == i) return;
        const double d = std::hypot(vectors[i].x - vectors[j].x,
                                    vectors[i].y - vectors[j].y);
        nn[i] = std::min(nn[i], d);
      });
      // Safety valve: an empty far ring with nothing found yet means the
      // points are extremely uneven; keep expanding until something hits.
      if (r > 0 && !any && nn[i] == std::numeric_limits<double>::infinity() &&
          r * grid.cell_size() > 2.0 * span)
        break;
    }
  }
  std::sort(nn.begin(), nn.end());
  return nn[n / 2];
}

NeighborGraph build_neighbor_graph(std::span<const FlowVector> vectors,
                                   int k_nn, double radius) {
  if (!(radius > 0.0))
    throw std::invalid_argument("build_neighbor_graph: radius must be > 0");
  const int n = static_cast<int>(vectors.size());
  NeighborGraph g;
  g.n_nodes = n;

  const PointGrid grid(vectors, radius);
  std::vector<std::pair<double, int>> within;
  std::vector<std::pair<int, int>> raw;
  for (int i = 0; i < n; ++i) {
    within.clear();
    const int cx = grid.cx(vectors[i].x), cy = grid.cy(vectors[i].y);
    for (int r = 0; r <= 1; ++r)
      grid.visit_ring(cx, cy, r, [&](int j) {
        if (j == i) return;
        const double d = std::hypot(vectors[i].x - vectors[j].x,
                                    vectors[i].y - vectors[j].y);
        if (d <= radius) within.emplace_back(d, j);
      });
    std::sort(within.begin(), within.end());
    const int take = std::min<int>(k_nn, static_cast<int>(within.size()));
    for (int k = 0; k < take; ++k) {
      const int j = within[k].second;
      raw.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  g.edges = std::move(raw);
  return g;
}

MrfResult mrf_relabel(std::span<const double> angles,
                      std::span<const VonMisesComponent> mixture,
                      const NeighborGraph& graph, double beta) {
  if (mixture.empty())
    throw std::invalid_argument("mrf_relabel: mixture needs >= 1 component");
  if (beta < 0.0) throw std::invalid_argument("mrf_relabel: beta must be >= 0");
  const int n = static_cast<int>(angles.size());
  const int k = static_cast<int>(mixture.size());

  std::vector<std::vector<double>> data(n, std::vector<double>(k));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c)
      data[i][c] = -std::log(std::max(mixture[c].weight, 1e-300)) -
                   mixture[c].kappa * std::cos(angles[i] - mixture[c].mu) +
                   log_bessel_i0(mixture[c].kappa);

  MrfResult res;
  res.labels.resize(n);
  for (int i = 0; i < n; ++i)
    res.labels[i] = static_cast<int>(
        std::min_element(data[i].begin(), data[i].end()) - data[i].begin());
  res.energy_before = potts_energy(res.labels, data, graph, beta);
  res.energy_after = res.energy_before;
  if (n == 0 || k == 1 || beta == 0.0) return res;

  // Expansion sweeps: binary subproblem per label alpha, solved exactly
  // by min-cut (x=0 keep current label, x=1 switch to alpha).
  bool improved = true;
  int sweeps = 0;
  while (improved && sweeps < 20) {
    improved = false;
    ++sweeps;
    for (int alpha = 0; alpha < k; ++alpha) {
      // Unary terms.
      std::vector<double> u0(n), u1(n);
      for (int i = 0; i < n; ++i) {
        u0[i] = res.labels[i] == alpha ? data[i][alpha] : data[i][res.labels[i]];
        u1[i] = data[i][alpha];
      }
      // Pairwise Potts terms, reduced to unary adjustments plus one
      // submodular edge term (Kolmogorov-Zabih construction).
      std::vector<double> cap_edge(graph.edges.size(), 0.0);
      double constant = 0.0;
      for (size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [i, j] = graph.edges[e];
        const double A = res.labels[i] != res.labels[j] ? beta : 0.0;  // (0,0)
        const double B = res.labels[i] != alpha ? beta : 0.0;          // (0,1)
        const double C = res.labels[j] != alpha ? beta : 0.0;          // (1,0)
        constexpr double D = 0.0;                                      // (1,1)
        constant += A;
        u1[i] += C - A;
        u1[j] += D - C;
        cap_edge[e] = B + C - A - D;  // >= 0 (triangle inequality)
      }

      // Cut convention: source side = keep (x=0), sink side = alpha (x=1).
      MaxFlow mf(n + 2);
      const int src = n, snk = n + 1;
      double base = constant;
      for (int i = 0; i < n; ++i) {
        const double d0 = u0[i], d1 = u1[i];
        base += std::min(d0, d1);
        if (d1 > d0) mf.add_edge(src, i, d1 - d0);  // cut when i takes alpha
        else mf.add_edge(i, snk, d0 - d1);          // cut when i keeps
      }
      for (size_t e = 0; e < graph.edges.size(); ++e)
        if (cap_edge[e] > 0.0)
          mf.add_edge(graph.edges[e].first, graph.edges[e].second, cap_edge[e]);

      const double flow = mf.solve(src, snk);
      const double move_energy = base + flow;
      if (move_energy < res.energy_after - 1e-12) {
        std::vector<int> next = res.labels;
        for (int i = 0; i < n; ++i)
          if (!mf.source_side(i)) next[i] = alpha;
        // Recompute exactly; accept only a true decrease.
        const double exact = potts_energy(next, data, graph, beta);
        if (exact < res.energy_after - 1e-12) {
          res.labels = std::move(next);
          res.energy_after = exact;
          ++res.moves_accepted;
          improved = true;
        }
      }
    }
  }
  return res;
}

}  // namespace ifta
