#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ifta/assignment.hpp"
#include "ifta/circular.hpp"
#include "ifta/geometry.hpp"
#include "ifta/io.hpp"

namespace ifta {

// A gated candidate link from a detection in frame t to one in t+1.
struct CandidateLink {
  int from = 0;
  int to = 0;
  double dx = 0.0;
  double dy = 0.0;
  int best_pred = -1;  // index into the previous step's selected links
};

struct CostBreakdown {
  double c_eq = 0.0;      // equidistance penalty, [0, 1]
  double c_turn = 0.0;    // sharp-turn penalty, [0, 1]
  double c_cohort = 0.0;  // cohort-conformity penalty, [0, 1]
  double total = 0.0;     // variance-normalized weighted sum
};

// Bayesian-reweighted component weights plus their running variances.
struct Weights {
  double w_eq = 1.0 / 3.0;
  double w_turn = 1.0 / 3.0;
  double w_cohort = 1.0 / 3.0;
  double var_eq = 1.0;
  double var_turn = 1.0;
  double var_cohort = 1.0;
};

// All pairs within the calibrated displacement gate, found via uniform
// grid binning. Output sorted by (from, to).
std::vector<CandidateLink> gen_candidates(std::span<const Detection> frame_t,
                                          std::span<const Detection> frame_t1,
                                          double max_disp_px);

// Displacements below this magnitude are treated as stationary (turn
// angle undefined, c_turn = 0).
constexpr double kStationaryEps = 0.25;

// Triplet cost of one link given its predecessor displacement and the
// current cohort model (either may be absent).
CostBreakdown link_cost(const std::optional<std::pair<double, double>>& pred_disp,
                        std::pair<double, double> link_disp,
                        std::span<const VonMisesComponent> cohort,
                        const Weights& w);

// 16 log-spaced lambdas over [0.1, 10] x median total cost; fixed
// fallback grid when the median is ~0.
std::vector<double> default_lambda_grid(std::span<const CostBreakdown> costs,
                                        int size = 16);

struct ParetoPoint {
  int link_count = 0;
  double total_cost = 0.0;
  double lambda = 0.0;
};

struct ParetoFrontier {
  std::vector<ParetoPoint> points;  // one per lambda, sorted by lambda
  int chosen = 0;                   // utopia-nearest point
  bool degenerate = false;          // all points identical
};

struct ParetoResult {
  ParetoFrontier frontier;
  AssignmentSolution solution;  // the chosen lambda's assignment
};

// Solves the assignment along the lambda grid, normalizes (count, cost)
// over the frontier extremes, and picks the point nearest the utopia
// corner (1, 0); ties go to the larger link count.
ParetoResult pareto_select(int n_left, int n_right,
                           std::span<const CandidateLink> candidates,
                           std::span<const CostBreakdown> costs,
                           std::span<const double> lambda_grid);

struct TrackerConfig {
  CalibrationConfig calib;
  int lambda_grid_size = 16;
  int max_iterations = 10;       // reweighting cap per frame step
  double convergence_frac = 0.05;
  double freeze_frac = 0.15;     // below this, model/weights stop updating
  double weight_epsilon = 1e-2;  // w_i ~ 1/(var_i + eps)
  double var_floor = 1e-6;
  int k_max = 5;                 // mixture components for the cohort model
  double w_min = 0.02;
  uint64_t seed = 0;
};

struct TrackedLink {
  FlowVector vec;
  double cost = 0.0;  // final CostBreakdown total
};

struct TrackResult {
  // One link set per frame step t (links t -> t+1); index t in
  // [0, n_frames - 1), empty when nothing was selected.
  std::vector<std::vector<TrackedLink>> steps;
  std::vector<IterRow> iterations;
  std::vector<int> cap_hit_frames;  // frame steps that hit the iteration cap
  std::vector<VonMisesComponent> final_model;
  Weights final_weights;
};

// Full IFTA loop: per frame step, alternate cost evaluation, Pareto
// selection, cohort-model refit, and inverse-variance reweighting until
// fewer than convergence_frac of the selected links change.
TrackResult track_sequence(const std::vector<std::vector<Detection>>& frames,
                           const TrackerConfig& cfg);

}  // namespace ifta
