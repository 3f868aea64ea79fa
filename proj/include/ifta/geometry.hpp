#pragma once

#include <cmath>
#include <span>
#include <vector>

// Shared geometric and circular-statistics primitives.
//
// Conventions: angles are radians in (-pi, pi]; image coordinates are
// x-right, y-down (image convention); all wrap arithmetic lives here.

namespace ifta {

constexpr double kPi = 3.14159265358979323846;

// Wrap an angle into the canonical range (-pi, pi].
double wrap_angle(double a);

// Signed shortest rotation from b to a, in (-pi, pi].
double angular_diff(double a, double b);

struct MeanResultant {
  double mu = 0.0;    // mean direction; undefined when degenerate
  double rbar = 0.0;  // mean resultant length in [0, 1]
  bool degenerate = false;  // rbar below 1e-9, no usable mean direction
};

// Weighted circular mean. Pass an empty weight span for equal weights.
// Throws std::invalid_argument when no sample carries positive weight.
MeanResultant mean_resultant(std::span<const double> angles,
                             std::span<const double> weights = {});

// A localized point feature at one frame.
struct Detection {
  int frame = 0;
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;
};

// An accepted link from frame `frame` to frame+1.
struct FlowVector {
  int frame = 0;
  double x = 0.0;   // origin, frame t
  double y = 0.0;
  double dx = 0.0;  // displacement per frame
  double dy = 0.0;

  double angle() const { return std::atan2(dy, dx); }
  double speed() const { return std::hypot(dx, dy); }
};

// Camera/scene calibration. The default speed cap is 44.7 km/h, the
// fastest a human can run.
struct CalibrationConfig {
  double meters_per_pixel = 0.05;
  double fps = 20.0;
  double v_max_mps = 44.7 / 3.6;

  double max_disp_px() const { return v_max_mps / meters_per_pixel / fps; }
};

}  // namespace ifta
