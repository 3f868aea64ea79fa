#include "ifta/alert.hpp"

#include "ifta/circular.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ifta {

std::vector<SensitiveLocation> load_locations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open locations file: " + path);
  std::vector<SensitiveLocation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || lineno == 1) continue;  // header `id,x,y,radius`
    std::stringstream ss(line);
    SensitiveLocation loc;
    std::string f;
    try {
      std::getline(ss, loc.id, ',');
      std::getline(ss, f, ',');
      loc.x = std::stod(f);
      std::getline(ss, f, ',');
      loc.y = std::stod(f);
      std::getline(ss, f, ',');
      loc.radius = std::stod(f);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed location row");
    }
    if (loc.radius <= 0.0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": location radius must be > 0");
    out.push_back(loc);
  }
  return out;
}

std::vector<CohortRow> cohort_report(const CohortModel& model,
                                     std::span<const FlowVector> vectors,
                                     const CalibrationConfig& calib, int frame,
                                     std::span<const int> cohort_ids,
                                     const AlertConfig& cfg) {
  (void)calib;
  if (cohort_ids.size() != model.components.size())
    throw std::invalid_argument("cohort_report: cohort_ids/component mismatch");
  if (model.labels.size() != vectors.size())
    throw std::invalid_argument("cohort_report: model labels misaligned");

  std::vector<CohortRow> out;
  for (const CohortAggregate& a : model.aggregates) {
    if (a.count < cfg.min_members) continue;
    if (a.rbar < cfg.r_min) continue;
    // The component itself must describe organized motion: a near-uniform
    // component can end up with spuriously coherent members after the
    // density-floor exclusion trims it to the half circle around its mean.
    if (bessel_i1_over_i0(model.components[a.component].kappa) < cfg.r_min)
      continue;
    CohortRow r;
    r.frame = frame;
    r.cohort_id = cohort_ids[a.component];
    r.count = a.count;
    r.centroid_x = a.centroid_x;
    r.centroid_y = a.centroid_y;
    r.mean_dir_rad = a.mean_dir;
    r.mean_speed_px = a.mean_speed;
    r.kappa = model.components[a.component].kappa;
    r.weight = model.components[a.component].weight;
    out.push_back(r);
  }
  return out;
}

std::vector<AlertEvent> check_alerts(const CohortRow& report,
                                     std::span<const SensitiveLocation> locations,
                                     const CalibrationConfig& calib,
                                     double angle_tol_deg) {
  std::vector<AlertEvent> out;
  if (report.mean_speed_px <= 0.0) return out;
  const double speed_mps =
      report.mean_speed_px * calib.meters_per_pixel * calib.fps;
  const double tol_rad = angle_tol_deg * kPi / 180.0;

  for (const SensitiveLocation& loc : locations) {
    const double bx = loc.x - report.centroid_x;
    const double by = loc.y - report.centroid_y;
    const double dist = std::hypot(bx, by);
    if (dist < 1e-9) continue;  // already there
    const double bearing = std::atan2(by, bx);
    const double off = std::abs(angular_diff(report.mean_dir_rad, bearing));
    // Boundary inclusive: approach at exactly the tolerance still alerts.
    if (std::cos(off) < std::cos(tol_rad) - 1e-12) continue;

    AlertEvent ev;
    ev.frame_issued = report.frame;
    ev.cohort_id = report.cohort_id;
    ev.location_id = loc.id;
    ev.count = report.count;
    ev.approach_angle_deg = off * 180.0 / kPi;
    ev.eta_seconds =
        std::max(0.0, (dist - loc.radius) * calib.meters_per_pixel / speed_mps);
    out.push_back(ev);
  }
  return out;
}

bool AlertDeduper::admit(const AlertEvent& ev) {
  const auto key = std::make_pair(ev.cohort_id, ev.location_id);
  const auto it = last_.find(key);
  if (it != last_.end()) {
    const AlertEvent& prev = it->second;
    const double rel =
        std::abs(ev.eta_seconds - prev.eta_seconds) /
        std::max(prev.eta_seconds, 1e-9);
    const bool stale = ev.frame_issued - prev.frame_issued >= cfg_.realert_frames;
    if (rel <= cfg_.eta_realert_frac && !stale) return false;
  }
  last_[key] = ev;
  return true;
}

std::string alert_to_json(const AlertEvent& ev) {
  std::ostringstream os;
  os << "{\"frame_issued\":" << ev.frame_issued
     << ",\"cohort_id\":" << ev.cohort_id << ",\"location_id\":\""
     << ev.location_id << "\",\"eta_seconds\":" << fmt_double(ev.eta_seconds)
     << ",\"count\":" << ev.count
     << ",\"approach_angle_deg\":" << fmt_double(ev.approach_angle_deg) << "}";
  return os.str();
}

DensityMap density_map(std::span<const Detection> detections, double cell_px,
                       double arena_w, double arena_h) {
  if (!(cell_px > 0.0))
    throw std::invalid_argument("density_map: cell_px must be > 0");
  DensityMap m;
  m.cell_px = cell_px;
  m.nx = std::max(1, static_cast<int>(std::ceil(arena_w / cell_px)));
  m.ny = std::max(1, static_cast<int>(std::ceil(arena_h / cell_px)));
  m.counts.assign(static_cast<size_t>(m.nx) * m.ny, 0);
  for (const Detection& d : detections) {
    if (d.x < 0.0 || d.y < 0.0 || d.x >= arena_w || d.y >= arena_h) continue;
    const int cx = static_cast<int>(d.x / cell_px);
    const int cy = static_cast<int>(d.y / cell_px);
    ++m.counts[static_cast<size_t>(cy) * m.nx + cx];
    ++m.total;
  }
  return m;
}

}  // namespace ifta
