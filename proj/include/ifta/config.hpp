#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ifta/alert.hpp"
#include "ifta/detect.hpp"
#include "ifta/geometry.hpp"
#include "ifta/linker.hpp"
#include "ifta/sim.hpp"

namespace ifta {

// Full run configuration with documented defaults. Files use a flat
// `section.key = value` format ('#' comments, unknown keys rejected).
struct RunConfig {
  CalibrationConfig calib;
  DetectorConfig detector;

  // linker.*
  int lambda_grid_size = 16;
  int max_iterations = 10;
  double convergence_frac = 0.05;
  double freeze_frac = 0.15;
  double weight_epsilon = 1e-2;
  double var_floor = 1e-6;

  // cohort.*
  int k_max = 5;
  double w_min = 0.02;
  double beta = 1.0;
  int k_nn = 8;
  double radius_scale = 3.0;  // MRF radius = scale x median NN distance
  double density_floor = 1.0 / (2.0 * kPi);
  double pool_threshold = 2.5;  // vectors per 100x100 px cell

  AlertConfig alert;
  std::string locations_path;

  ScenarioConfig sim;  // simulator section (sim.*)

  // io.*
  std::string detections_path;
  std::string frames_dir;  // PGM frames alternative input

  double density_cell_px = 100.0;

  uint64_t seed = 1;

  TrackerConfig tracker_config() const;
};

// Parses a config file into cfg (on top of its current values).
// Throws on unknown keys, malformed lines, or bad values.
void apply_config_file(const std::string& path, RunConfig* cfg);
void apply_config_line(const std::string& key, const std::string& value,
                       RunConfig* cfg);

// The effective configuration, serializable and re-parseable.
std::string config_to_string(const RunConfig& cfg);

}  // namespace ifta
