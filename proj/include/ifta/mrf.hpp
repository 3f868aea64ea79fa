#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ifta/circular.hpp"
#include "ifta/geometry.hpp"

namespace ifta {

struct NeighborGraph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // undirected, first < second, sorted
};

// Up to k_nn nearest vector origins within radius, symmetrized.
NeighborGraph build_neighbor_graph(std::span<const FlowVector> vectors,
                                   int k_nn, double radius);

// Median nearest-neighbor distance of vector origins (used for the
// default MRF radius); 0 when fewer than 2 vectors.
double median_nn_distance(std::span<const FlowVector> vectors);

struct MrfResult {
  std::vector<int> labels;
  double energy_before = 0.0;
  double energy_after = 0.0;
  int moves_accepted = 0;
};

// Potts-regularized relabeling: minimizes
//   E(l) = sum_i D_i(l_i) + beta * sum_{(i,j)} [l_i != l_j],
//   D_i(l) = -log w_l - kappa_l cos(theta_i - mu_l) + log I0(kappa_l),
// by expansion moves, each solved exactly via min-cut. Energy never
// increases across accepted moves.
MrfResult mrf_relabel(std::span<const double> angles,
                      std::span<const VonMisesComponent> mixture,
                      const NeighborGraph& graph, double beta);

}  // namespace ifta
