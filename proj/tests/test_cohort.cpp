#include <doctest.h>
#include <span>
#include <stdexcept>

#include <vector>

#include "ifta/cohort.hpp"

using namespace ifta;

namespace {

std::vector<FlowVector> n_vectors(int n, double dx = 1.0, double dy = 0.0) {
  std::vector<FlowVector> v(n);
  for (int i = 0; i < n; ++i) v[i] = {0, 10.0 * i, 5.0, dx, dy};
  return v;
}

}  // namespace

TEST_CASE("sliding window pools up to five sets, newest first") {
  std::vector<std::vector<FlowVector>> sets = {
      n_vectors(3), n_vectors(4), n_vectors(0), n_vectors(2), n_vectors(1)};
  const auto pooled = sliding_window_aggregate(sets);
  CHECK(pooled.size() == 10);
  // Tags follow the set index, newest = 0.
  int counts[5] = {0, 0, 0, 0, 0};
  for (const auto& p : pooled) {
    REQUIRE(p.source_triplet >= 0);
    REQUIRE(p.source_triplet < 5);
    ++counts[p.source_triplet];
  }
  CHECK(counts[0] == 3);
  CHECK(counts[1] == 4);
  CHECK(counts[2] == 0);
  CHECK(counts[3] == 2);
  CHECK(counts[4] == 1);
  // The newest set's vectors come first in the pooled order.
  for (int i = 0; i < 3; ++i) CHECK(pooled[i].source_triplet == 0);
}

TEST_CASE("window rejects more than five sets") {
  std::vector<std::vector<FlowVector>> sets(8, n_vectors(2));
  CHECK_THROWS_AS((void)sliding_window_aggregate(sets), std::invalid_argument);
  const std::span<const std::vector<FlowVector>> tail(sets.data() + 3, 5);
  const auto pooled = sliding_window_aggregate(tail);
  CHECK(pooled.size() == 10);
  for (const auto& p : pooled) CHECK(p.source_triplet < 5);
}

TEST_CASE("pooling gate compares density to the threshold") {
  // 20 vectors on a 1000 x 500 arena: 50 cells of 100x100, 0.4 per cell.
  CHECK(should_aggregate(20, 1000.0, 500.0, 1.0));
  CHECK_FALSE(should_aggregate(20, 1000.0, 500.0, 0.3));
  CHECK_FALSE(should_aggregate(60, 1000.0, 500.0, 1.0));
  // Tiny arenas still count as one cell minimum.
  CHECK(should_aggregate(0, 50.0, 50.0, 0.5));
}

TEST_CASE("cohort model aggregates members per component") {
  std::vector<FlowVector> v;
  // Component 0: 4 vectors along +x at y = 0; component 1: 2 along +y.
  for (int i = 0; i < 4; ++i) v.push_back({0, double(10 * i), 0.0, 2.0, 0.0});
  for (int i = 0; i < 2; ++i) v.push_back({0, double(10 * i), 50.0, 0.0, 3.0});
  const std::vector<VonMisesComponent> comps = {{0.0, 8.0, 0.7},
                                                {kPi / 2.0, 8.0, 0.3}};
  const std::vector<int> labels = {0, 0, 0, 0, 1, 1};
  const auto model = build_cohort_model(v, comps, labels, 1e-6);
  REQUIRE(model.aggregates.size() == 2);
  CHECK(model.labels == labels);
  CHECK(model.aggregates[0].count == 4);
  CHECK(model.aggregates[0].centroid_x == doctest::Approx(15.0));
  CHECK(model.aggregates[0].centroid_y == doctest::Approx(0.0));
  CHECK(model.aggregates[0].mean_dir == doctest::Approx(0.0));
  CHECK(model.aggregates[0].mean_speed == doctest::Approx(2.0));
  CHECK(model.aggregates[0].rbar == doctest::Approx(1.0));
  CHECK(model.aggregates[1].count == 2);
  CHECK(model.aggregates[1].mean_dir == doctest::Approx(kPi / 2.0));
  CHECK(model.aggregates[1].mean_speed == doctest::Approx(3.0));
}

TEST_CASE("density floor demotes weak-fit vectors to unorganized") {
  // A vector pointing opposite a tight component has negligible density
  // under it; with a floor above that density it must be dropped.
  std::vector<FlowVector> v = {{0, 0.0, 0.0, 1.0, 0.0},
                               {0, 10.0, 0.0, -1.0, 0.0}};
  const std::vector<VonMisesComponent> comps = {{0.0, 20.0, 1.0}};
  const std::vector<int> labels = {0, 0};
  const auto model = build_cohort_model(v, comps, labels, 1.0 / (2.0 * kPi));
  CHECK(model.labels[0] == 0);
  CHECK(model.labels[1] == -1);
  REQUIRE(model.aggregates.size() == 1);
  CHECK(model.aggregates[0].count == 1);
}
