#include "ifta/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "ifta/geometry.hpp"

namespace ifta {

namespace {

// Nearest ground-truth object id within radius, or nullopt.
std::optional<long> match_id(const std::vector<const DetectionRow*>& frame_rows,
                             double x, double y, double radius) {
  double best = radius * radius;
  std::optional<long> id;
  for (const DetectionRow* r : frame_rows) {
    const double d2 = (r->x - x) * (r->x - x) + (r->y - y) * (r->y - y);
    if (d2 <= best) {
      best = d2;
      id = r->object_id;
    }
  }
  return id;
}

}  // namespace

EvalReport evaluate(const std::vector<LinkRow>& links,
                    const std::vector<CohortRow>& reports,
                    const std::vector<DetectionRow>& truth,
                    std::optional<int> onset_frame, double match_radius_px) {
  if (truth.empty()) throw std::invalid_argument("evaluate: empty ground truth");
  for (const auto& r : truth)
    if (!r.has_ids)
      throw std::invalid_argument("evaluate: ground truth lacks object ids");

  int max_frame = 0;
  std::map<int, std::vector<const DetectionRow*>> by_frame;
  for (const auto& r : truth) {
    by_frame[r.frame].push_back(&r);
    max_frame = std::max(max_frame, r.frame);
  }
  for (const auto& l : links)
    if (l.frame < 0 || l.frame + 1 > max_frame)
      throw std::invalid_argument("evaluate: link frame outside ground truth");

  // True links: same object visible in consecutive frames.
  long n_true = 0;
  std::map<std::pair<int, long>, const DetectionRow*> vis;
  for (const auto& r : truth)
    if (r.object_id >= 0) vis[{r.frame, r.object_id}] = &r;
  for (const auto& [key, row] : vis)
    if (key.first + 1 <= max_frame && vis.count({key.first + 1, key.second}))
      ++n_true;

  long tp = 0;
  for (const auto& l : links) {
    const auto a = match_id(by_frame[l.frame], l.from_x, l.from_y, match_radius_px);
    const auto b = match_id(by_frame[l.frame + 1], l.to_x, l.to_y, match_radius_px);
    if (a && b && *a == *b && *a >= 0) ++tp;
  }

  EvalReport rep;
  rep.link_precision = links.empty() ? 1.0 : static_cast<double>(tp) / links.size();
  rep.link_recall = n_true == 0 ? 1.0 : static_cast<double>(tp) / n_true;

  // True cohort directions: direction of the summed displacement of all
  // members over consecutive visible frames (jitter cancels, organized
  // motion dominates).
  std::map<int, std::pair<double, double>> true_dirs;
  for (const auto& [key, row] : vis) {
    const auto it = vis.find({key.first + 1, key.second});
    if (it == vis.end() || row->cohort_id < 0) continue;
    auto& acc = true_dirs[row->cohort_id];
    acc.first += it->second->x - row->x;
    acc.second += it->second->y - row->y;
  }

  // Reported cohorts at the final frame.
  int report_final = -1;
  for (const auto& r : reports) report_final = std::max(report_final, r.frame);
  std::map<int, double> reported;  // cohort_id -> mean_dir at final frame
  for (const auto& r : reports)
    if (r.frame == report_final) reported[r.cohort_id] = r.mean_dir_rad;

  rep.cohort_count_error = std::abs(static_cast<int>(reported.size()) -
                                    static_cast<int>(true_dirs.size()));

  // Greedy direction matching.
  std::vector<std::pair<int, double>> rl(reported.begin(), reported.end());
  std::set<int> used;
  double err_sum = 0.0;
  int n_matched = 0;
  for (const auto& [rid, rdir] : rl) {
    int best_c = -1;
    double best_e = 1e18;
    for (const auto& [cid, acc] : true_dirs) {
      if (used.count(cid)) continue;
      const double tdir = std::atan2(acc.second, acc.first);
      const double e = std::abs(angular_diff(rdir, tdir));
      if (e < best_e) {
        best_e = e;
        best_c = cid;
      }
    }
    if (best_c >= 0) {
      used.insert(best_c);
      err_sum += best_e * 180.0 / kPi;
      ++n_matched;
    }
  }
  rep.mean_direction_error_deg = n_matched > 0 ? err_sum / n_matched : 0.0;

  // Onset latency: first report matching any true cohort direction
  // within 30 degrees.
  if (onset_frame) {
    int first = -1;
    for (const auto& r : reports) {
      bool match = false;
      for (const auto& [cid, acc] : true_dirs) {
        const double tdir = std::atan2(acc.second, acc.first);
        if (std::abs(angular_diff(r.mean_dir_rad, tdir)) <= 30.0 * kPi / 180.0)
          match = true;
      }
      if (match && (first < 0 || r.frame < first)) first = r.frame;
    }
    if (first >= 0) {
      rep.onset_detected = true;
      rep.onset_latency_frames = std::max(0, first - *onset_frame);
    }
  }
  return rep;
}

}  // namespace ifta
