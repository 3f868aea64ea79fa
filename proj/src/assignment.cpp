#include "ifta/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace ifta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieEps = 1e-12;

struct DSU {
  std::vector<int> parent;
  explicit DSU(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// One connected component of the candidate graph, solved by successive
// shortest augmenting paths with Dijkstra over reduced costs.
struct ComponentSolver {
  // Local node ids: 0 = source, 1..nl = left, nl+1..nl+nr = right,
  // nl+nr+1 = sink.
  int nl = 0, nr = 0;
  std::vector<int> left_ids, right_ids;        // local -> global
  std::vector<std::vector<int>> adj;           // per local left: edge slots
  std::vector<int> edge_to;                    // slot -> local right
  std::vector<double> edge_w;                  // slot -> cost - lambda
  std::vector<int> edge_orig;                  // slot -> original edge index

  void solve(std::vector<int>* selected, double* total_cost_delta) {
    const int n_nodes = nl + nr + 2;
    const int src = 0, snk = nl + nr + 1;
    std::vector<double> pot(n_nodes, 0.0);
    for (int l = 0; l < nl; ++l)
      for (int slot : adj[l])
        pot[1 + nl + edge_to[slot]] =
            std::min(pot[1 + nl + edge_to[slot]], edge_w[slot]);
    for (int r = 0; r < nr; ++r) pot[snk] = std::min(pot[snk], pot[1 + nl + r]);

    std::vector<int> match_l(nl, -1);  // left -> edge slot
    std::vector<int> match_r(nr, -1);  // right -> edge slot

    std::vector<double> dist(n_nodes);
    std::vector<int> par_edge(n_nodes);  // edge slot used to reach node (-1: s-edge/t-edge)
    std::vector<int> par_node(n_nodes);
    std::vector<char> done(n_nodes);
    using QE = std::pair<double, int>;

    while (true) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(done.begin(), done.end(), 0);
      std::fill(par_edge.begin(), par_edge.end(), -2);
      std::fill(par_node.begin(), par_node.end(), -1);
      std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
      dist[src] = 0.0;
      pq.push({0.0, src});
      while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == snk) break;
        if (u == src) {
          for (int l = 0; l < nl; ++l) {
            if (match_l[l] != -1) continue;
            const double nd = d + 0.0 + pot[src] - pot[1 + l];
            if (nd < dist[1 + l] - kTieEps) {
              dist[1 + l] = nd;
              par_edge[1 + l] = -1;
              par_node[1 + l] = src;
              pq.push({nd, 1 + l});
            }
          }
        } else if (u <= nl) {
          const int l = u - 1;
          for (int slot : adj[l]) {
            if (slot == match_l[l]) continue;  // saturated forward edge
            const int rv = 1 + nl + edge_to[slot];
            const double nd = d + edge_w[slot] + pot[u] - pot[rv];
            if (nd < dist[rv] - kTieEps) {
              dist[rv] = nd;
              par_edge[rv] = slot;
              par_node[rv] = u;
              pq.push({nd, rv});
            }
          }
        } else {
          const int r = u - 1 - nl;
          if (match_r[r] == -1) {
            const double nd = d + 0.0 + pot[u] - pot[snk];
            if (nd < dist[snk] - kTieEps) {
              dist[snk] = nd;
              par_edge[snk] = -1;
              par_node[snk] = u;
              pq.push({nd, snk});
            }
          } else {
            // Residual back edge r -> matched left.
            const int slot = match_r[r];
            const int lu = 1 + edge_left[slot];
            const double nd = d - edge_w[slot] + pot[u] - pot[lu];
            if (nd < dist[lu] - kTieEps) {
              dist[lu] = nd;
              par_edge[lu] = slot;
              par_node[lu] = u;
              pq.push({nd, lu});
            }
          }
        }
      }

      if (dist[snk] == kInf) break;
      const double true_cost = dist[snk] + pot[snk] - pot[src];
      if (true_cost > kTieEps) break;

      // Update potentials (cap at dist[snk] for unreached nodes).
      for (int v = 0; v < n_nodes; ++v)
        pot[v] += std::min(dist[v], dist[snk]);

      // Flip matches along the augmenting path.
      int v = snk;
      while (v != src) {
        const int u = par_node[v];
        const int slot = par_edge[v];
        if (slot >= 0) {
          if (v > nl && v < snk) {
            // forward left -> right
            match_r[v - 1 - nl] = slot;
            match_l[u - 1] = slot;
          }
          // backward right -> left just gets overwritten by the next
          // forward assignment above; nothing to do here.
        }
        v = u;
      }
    }

    for (int r = 0; r < nr; ++r) {
      if (match_r[r] == -1) continue;
      const int slot = match_r[r];
      selected->push_back(edge_orig[slot]);
      *total_cost_delta += edge_w[slot];
    }
  }

  std::vector<int> edge_left;  // slot -> local left
};

}  // namespace

AssignmentSolution solve_assignment(int n_left, int n_right,
                                    std::span<const AssignEdge> edges,
                                    double lambda) {
  if (!std::isfinite(lambda))
    throw std::invalid_argument("solve_assignment: lambda must be finite");

  AssignmentSolution sol;
  sol.lambda = lambda;

  // Edges with negative reward can never appear in an optimum.
  std::vector<int> keep;
  keep.reserve(edges.size());
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const AssignEdge& ed = edges[e];
    if (!std::isfinite(ed.cost))
      throw std::invalid_argument("solve_assignment: non-finite cost");
    if (ed.from < 0 || ed.from >= n_left || ed.to < 0 || ed.to >= n_right)
      throw std::invalid_argument("solve_assignment: edge index out of range");
    if (lambda - ed.cost >= 0.0) keep.push_back(e);
  }
  if (keep.empty()) return sol;

  // Connected components over (left, right) touched by kept edges.
  DSU dsu(n_left + n_right);
  for (int e : keep) dsu.unite(edges[e].from, n_left + edges[e].to);

  // Group kept edges by component root, in deterministic edge order.
  std::vector<std::pair<int, int>> rooted;  // (root, edge index)
  rooted.reserve(keep.size());
  for (int e : keep) rooted.emplace_back(dsu.find(edges[e].from), e);
  std::stable_sort(rooted.begin(), rooted.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<int> local_left(n_left, -1), local_right(n_right, -1);
  double lambda_cost_sum = 0.0;

  size_t i = 0;
  while (i < rooted.size()) {
    size_t j = i;
    while (j < rooted.size() && rooted[j].first == rooted[i].first) ++j;

    ComponentSolver cs;
    for (size_t k = i; k < j; ++k) {
      const AssignEdge& ed = edges[rooted[k].second];
      if (local_left[ed.from] == -1) {
        local_left[ed.from] = cs.nl++;
        cs.left_ids.push_back(ed.from);
        cs.adj.emplace_back();
      }
      if (local_right[ed.to] == -1) {
        local_right[ed.to] = cs.nr++;
        cs.right_ids.push_back(ed.to);
      }
      const int slot = static_cast<int>(cs.edge_to.size());
      cs.adj[local_left[ed.from]].push_back(slot);
      cs.edge_to.push_back(local_right[ed.to]);
      cs.edge_w.push_back(ed.cost - lambda);
      cs.edge_orig.push_back(rooted[k].second);
      cs.edge_left.push_back(local_left[ed.from]);
    }

    cs.solve(&sol.selected, &lambda_cost_sum);

    for (int g : cs.left_ids) local_left[g] = -1;
    for (int g : cs.right_ids) local_right[g] = -1;
    i = j;
  }

  std::sort(sol.selected.begin(), sol.selected.end());
  sol.total_cost = 0.0;
  for (int e : sol.selected) sol.total_cost += edges[e].cost;
  return sol;
}

}  // namespace ifta
