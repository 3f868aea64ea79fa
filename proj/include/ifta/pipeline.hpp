#pragma once

#include <string>
#include <vector>

#include "ifta/alert.hpp"
#include "ifta/config.hpp"
#include "ifta/eval.hpp"
#include "ifta/linker.hpp"

namespace ifta {

struct PipelineOutput {
  std::vector<LinkRow> links;
  std::vector<CohortRow> reports;
  std::vector<AlertEvent> alerts;
  std::vector<IterRow> iterations;
  std::vector<int> cap_hit_frames;
  DensityMap density;
  double arena_w = 0.0, arena_h = 0.0;
};

// Full tracking pipeline over in-memory frames: link assignment with
// reweighting, cohort clustering (with sliding-window pooling in sparse
// scenes) + MRF relabeling, reports, and alerts.
PipelineOutput run_pipeline(const std::vector<std::vector<Detection>>& frames,
                            const RunConfig& cfg);

// Writes links.csv, cohorts.csv, alerts.jsonl, iterations.csv,
// density.csv and config.txt to out_dir atomically (temp-then-rename;
// nothing is left behind on failure).
void write_outputs(const PipelineOutput& out, const RunConfig& cfg,
                   const std::string& out_dir);

// Reads detections from cfg.detections_path or detects over PGM frames
// in cfg.frames_dir.
std::vector<std::vector<Detection>> load_input_frames(const RunConfig& cfg);

}  // namespace ifta
