#include "ifta/cohort.hpp"

#include <cmath>
#include <stdexcept>

namespace ifta {

std::vector<PooledVector> sliding_window_aggregate(
    std::span<const std::vector<FlowVector>> vector_sets) {
  if (vector_sets.empty() || vector_sets.size() > 5)
    throw std::invalid_argument("sliding_window_aggregate: expect 1-5 sets");
  std::vector<PooledVector> out;
  for (size_t s = 0; s < vector_sets.size(); ++s)
    for (const FlowVector& v : vector_sets[s])
      out.push_back({static_cast<int>(s), v});
  return out;
}

bool should_aggregate(size_t newest_count, double arena_w, double arena_h,
                      double min_vectors_per_cell) {
  if (arena_w <= 0.0 || arena_h <= 0.0) return true;
  const double cells = (arena_w / 100.0) * (arena_h / 100.0);
  return static_cast<double>(newest_count) / cells < min_vectors_per_cell;
}

CohortModel build_cohort_model(std::span<const FlowVector> vectors,
                               std::span<const VonMisesComponent> components,
                               std::span<const int> labels,
                               double density_floor) {
  if (labels.size() != vectors.size())
    throw std::invalid_argument("build_cohort_model: label/vector size mismatch");
  CohortModel m;
  m.components.assign(components.begin(), components.end());
  m.labels.assign(labels.begin(), labels.end());

  const double log_floor = std::log(std::max(density_floor, 1e-300));
  for (size_t i = 0; i < vectors.size(); ++i) {
    const int l = m.labels[i];
    if (l < 0) continue;
    if (l >= static_cast<int>(m.components.size()))
      throw std::invalid_argument("build_cohort_model: label out of range");
    if (vm_log_density(vectors[i].angle(), m.components[l]) < log_floor)
      m.labels[i] = -1;  // background random walker
  }

  for (int c = 0; c < static_cast<int>(m.components.size()); ++c) {
    CohortAggregate a;
    a.component = c;
    double sx = 0.0, sy = 0.0, ss = 0.0, rx = 0.0, ry = 0.0;
    for (size_t i = 0; i < vectors.size(); ++i) {
      if (m.labels[i] != c) continue;
      ++a.count;
      sx += vectors[i].x;
      sy += vectors[i].y;
      ss += vectors[i].speed();
      rx += std::cos(vectors[i].angle());
      ry += std::sin(vectors[i].angle());
    }
    if (a.count > 0) {
      a.centroid_x = sx / a.count;
      a.centroid_y = sy / a.count;
      a.mean_speed = ss / a.count;
      a.rbar = std::hypot(rx, ry) / a.count;
      a.mean_dir = a.rbar > 1e-9 ? std::atan2(ry, rx) : 0.0;
    }
    m.aggregates.push_back(a);
  }
  return m;
}

}  // namespace ifta
