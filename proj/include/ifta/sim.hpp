#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ifta/geometry.hpp"
#include "ifta/io.hpp"

namespace ifta {

struct CohortSpec {
  int count = 0;
  double direction = 0.0;      // radians
  double speed = 0.0;          // px/frame
  double heading_kappa = 8.0;  // per-frame heading concentration
  double spawn_x0 = 0.0, spawn_y0 = 0.0, spawn_x1 = 0.0, spawn_y1 = 0.0;
  int onset_frame = 0;  // stationary-with-jitter before this frame
};

struct ScenarioConfig {
  double arena_w = 500.0, arena_h = 500.0;
  int n_frames = 10;
  uint64_t seed = 1;
  int walker_count = 0;
  double step_sigma = 1.0;  // walker (and pre-onset cohort) step sigma
  std::vector<CohortSpec> cohorts;
  double p_miss = 0.0;       // per-detection dropout probability
  double clutter_rate = 0.0; // Poisson false detections per frame
};

struct SimResult {
  // Tracker input view: visible detections per frame (clutter included).
  std::vector<std::vector<Detection>> detections;
  // Ground-truth rows for every visible detection (object_id -1 =
  // clutter, cohort_id -1 = walker/clutter).
  std::vector<DetectionRow> truth;
  // Full trajectories including dropped detections.
  std::vector<DetectionRow> trajectories;
};

// Walkers take isotropic Gaussian steps; cohort members move at their
// configured speed with per-frame von Mises headings from onset_frame
// on (walker-like jitter before). Positions reflect at arena walls.
// Fully reproducible from cfg.seed.
SimResult simulate(const ScenarioConfig& cfg);

// Named fixed scenarios: interdigitated, onset, multi-gate, sparse.
// Unknown names raise with the list of valid presets.
ScenarioConfig preset_scenario(const std::string& name);

const std::vector<std::string>& preset_names();

}  // namespace ifta
