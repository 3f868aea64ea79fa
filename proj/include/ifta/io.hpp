#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ifta/geometry.hpp"

// CSV file formats. All files are UTF-8, LF line endings, '.' decimal
// separator, and start with a fixed header row.

namespace ifta {

// One detections-file row; object/cohort ids are present only in
// ground-truth files (object_id -1 marks clutter, cohort_id -1 walkers).
struct DetectionRow {
  int frame = 0;
  double x = 0.0;
  double y = 0.0;
  double score = 0.0;
  long object_id = -1;
  int cohort_id = -1;
  bool has_ids = false;
};

// Reads `frame,x,y,score[,object_id,cohort_id]` grouped by frame,
// frames sorted ascending, gaps filled with empty lists. The trailing
// id columns are ignored. Malformed rows raise with their line number.
std::vector<std::vector<Detection>> load_detections(const std::string& path);

// Same file, keeping the id columns when present.
std::vector<DetectionRow> load_detection_rows(const std::string& path);

void write_detection_rows(const std::string& path,
                          const std::vector<DetectionRow>& rows,
                          bool with_ids);

// Links CSV: `frame,from_x,from_y,to_x,to_y,cohort_id,cost`.
struct LinkRow {
  int frame = 0;
  double from_x = 0.0, from_y = 0.0;
  double to_x = 0.0, to_y = 0.0;
  int cohort_id = -1;
  double cost = 0.0;
};

std::vector<LinkRow> load_links(const std::string& path);
void write_links(const std::string& path, const std::vector<LinkRow>& rows);

// Iteration log: `frame,iter,links,total_cost,frac_changed`.
struct IterRow {
  int frame = 0;
  int iter = 0;
  int links = 0;
  double total_cost = 0.0;
  double frac_changed = 0.0;
};

void write_iters(const std::string& path, const std::vector<IterRow>& rows);

// Cohort report CSV:
// `frame,cohort_id,count,centroid_x,centroid_y,mean_dir_rad,mean_speed_px,kappa,weight`.
struct CohortRow {
  int frame = 0;
  int cohort_id = 0;
  int count = 0;
  double centroid_x = 0.0, centroid_y = 0.0;
  double mean_dir_rad = 0.0;
  double mean_speed_px = 0.0;
  double kappa = 0.0;
  double weight = 0.0;
};

std::vector<CohortRow> load_cohorts(const std::string& path);
void write_cohorts(const std::string& path, const std::vector<CohortRow>& rows);

// Fixed-precision float formatting shared by every writer so repeated
// runs are byte-identical.
std::string fmt_double(double v);

}  // namespace ifta
