#pragma once

#include <span>
#include <vector>

namespace ifta {

// A candidate edge in the bipartite link-selection problem.
struct AssignEdge {
  int from = 0;  // left-side index (frame t)
  int to = 0;    // right-side index (frame t+1)
  double cost = 0.0;
};

struct AssignmentSolution {
  std::vector<int> selected;  // indices into the edge span, sorted
  double total_cost = 0.0;    // sum of selected edge costs
  double lambda = 0.0;
  int link_count() const { return static_cast<int>(selected.size()); }
};

// Exact maximizer of sum(lambda - cost) over one-to-one edge subsets.
// Edges with lambda - cost < 0 are never selected; zero-reward edges are
// included (link count favored at equal objective). Deterministic:
// successive shortest augmenting paths with index tie-breaking, solved
// independently per connected component of the candidate graph.
AssignmentSolution solve_assignment(int n_left, int n_right,
                                    std::span<const AssignEdge> edges,
                                    double lambda);

}  // namespace ifta
