#pragma once

#include <span>
#include <vector>

#include "ifta/circular.hpp"
#include "ifta/geometry.hpp"

namespace ifta {

// A flow vector tagged with the index of the source triplet it came
// from (0 = newest) when pooled across a sliding window.
struct PooledVector {
  int source_triplet = 0;
  FlowVector vec;
};

// Concatenates up to 5 consecutive triplet outputs, newest first.
std::vector<PooledVector> sliding_window_aggregate(
    std::span<const std::vector<FlowVector>> vector_sets);

// Pooling engages when the newest set's density (vectors per 100x100 px
// cell) falls below the threshold.
bool should_aggregate(size_t newest_count, double arena_w, double arena_h,
                      double min_vectors_per_cell);

struct CohortAggregate {
  int component = 0;  // mixture component index
  int count = 0;
  double centroid_x = 0.0, centroid_y = 0.0;
  double mean_dir = 0.0;
  double mean_speed = 0.0;
  double rbar = 0.0;  // mean resultant length of member angles
};

// Final per-frame cohort description: mixture + per-vector labels
// (-1 = unorganized) + per-component aggregates over labeled members.
struct CohortModel {
  std::vector<VonMisesComponent> components;
  std::vector<int> labels;
  std::vector<CohortAggregate> aggregates;
};

// Assigns labels (from MRF or posterior argmax), demotes vectors whose
// best component density falls below density_floor to unorganized, and
// computes member aggregates.
CohortModel build_cohort_model(std::span<const FlowVector> vectors,
                               std::span<const VonMisesComponent> components,
                               std::span<const int> labels,
                               double density_floor);

}  // namespace ifta
