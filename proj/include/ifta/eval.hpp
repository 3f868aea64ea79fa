#pragma once

#include <optional>
#include <vector>

#include "ifta/io.hpp"

namespace ifta {

struct EvalReport {
  double link_precision = 1.0;  // 1.0 by convention when nothing predicted
  double link_recall = 1.0;
  int cohort_count_error = 0;
  double mean_direction_error_deg = 0.0;
  bool onset_detected = false;
  int onset_latency_frames = -1;  // valid only when onset_detected
};

// Scores predicted links and cohort reports against a ground-truth
// detections file (the 6-column format). A predicted link is a true
// positive iff both endpoints match the same object_id in consecutive
// frames within match_radius_px. Direction error is averaged over
// greedily matched (reported, true) cohort pairs at the final frame.
EvalReport evaluate(const std::vector<LinkRow>& links,
                    const std::vector<CohortRow>& reports,
                    const std::vector<DetectionRow>& truth,
                    std::optional<int> onset_frame = std::nullopt,
                    double match_radius_px = 1.0);

}  // namespace ifta
