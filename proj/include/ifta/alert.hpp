#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ifta/cohort.hpp"
#include "ifta/geometry.hpp"
#include "ifta/io.hpp"

namespace ifta {

struct SensitiveLocation {
  std::string id;
  double x = 0.0, y = 0.0;
  double radius = 1.0;  // arrival zone, px
};

// Loads `id,x,y,radius` CSV.
std::vector<SensitiveLocation> load_locations(const std::string& path);

struct AlertEvent {
  int frame_issued = 0;
  int cohort_id = 0;
  std::string location_id;
  double eta_seconds = 0.0;
  int count = 0;
  double approach_angle_deg = 0.0;  // angle between motion and bearing
};

struct AlertConfig {
  int min_members = 5;
  double r_min = 0.7;  // organized-motion gate on member resultant length
  double angle_tol_deg = 20.0;
  double eta_realert_frac = 0.2;  // re-alert when ETA moves by > 20%
  int realert_frames = 20;        // ... or this many frames pass
};

// One report per mixture component with enough coherent members.
// cohort_ids must parallel the model's components (stable across frames).
std::vector<CohortRow> cohort_report(const CohortModel& model,
                                     std::span<const FlowVector> vectors,
                                     const CalibrationConfig& calib, int frame,
                                     std::span<const int> cohort_ids,
                                     const AlertConfig& cfg);

// Approach test + straight-line ETA for one report against all
// locations. Boundary-inclusive on the angle tolerance; zero-speed
// reports never alert.
std::vector<AlertEvent> check_alerts(const CohortRow& report,
                                     std::span<const SensitiveLocation> locations,
                                     const CalibrationConfig& calib,
                                     double angle_tol_deg = 20.0);

// Suppresses repeat alerts for a (cohort, location) pair until the ETA
// changes by more than eta_realert_frac or realert_frames pass.
class AlertDeduper {
 public:
  explicit AlertDeduper(const AlertConfig& cfg) : cfg_(cfg) {}
  bool admit(const AlertEvent& ev);

 private:
  AlertConfig cfg_;
  std::map<std::pair<int, std::string>, AlertEvent> last_;
};

// JSON Lines serialization of one event (snake_case field names).
std::string alert_to_json(const AlertEvent& ev);

struct DensityMap {
  int nx = 0, ny = 0;
  double cell_px = 0.0;
  std::vector<long> counts;  // row-major, ny rows of nx
  long total = 0;
};

// Uniform grid over [0, arena_w) x [0, arena_h), half-open cells;
// detections outside the arena are dropped from the grid.
DensityMap density_map(std::span<const Detection> detections, double cell_px,
                       double arena_w, double arena_h);

}  // namespace ifta
