#include "ifta/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ifta {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path, int lineno) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                             ": malformed numeric field '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& path, int lineno) {
  try {
    size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                             ": malformed integer field '" + s + "'");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<DetectionRow> load_detection_rows(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  int lineno = 0;
  std::vector<DetectionRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line.rfind("frame,x,y,score", 0) != 0)
        throw std::runtime_error(path + ":1: unexpected header '" + line + "'");
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 4 && f.size() != 6)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 4 or 6 fields, got " +
                               std::to_string(f.size()));
    DetectionRow r;
    r.frame = static_cast<int>(parse_long(f[0], path, lineno));
    r.x = parse_double(f[1], path, lineno);
    r.y = parse_double(f[2], path, lineno);
    r.score = parse_double(f[3], path, lineno);
    if (r.frame < 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": negative frame index");
    if (f.size() == 6) {
      r.object_id = parse_long(f[4], path, lineno);
      r.cohort_id = static_cast<int>(parse_long(f[5], path, lineno));
      r.has_ids = true;
    }
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const DetectionRow& a, const DetectionRow& b) {
                     return a.frame < b.frame;
                   });
  return rows;
}

std::vector<std::vector<Detection>> load_detections(const std::string& path) {
  const auto rows = load_detection_rows(path);
  int max_frame = -1;
  for (const auto& r : rows) max_frame = std::max(max_frame, r.frame);
  std::vector<std::vector<Detection>> frames(max_frame + 1);
  for (const auto& r : rows)
    frames[r.frame].push_back({r.frame, r.x, r.y, r.score});
  return frames;
}

void write_detection_rows(const std::string& path,
                          const std::vector<DetectionRow>& rows,
                          bool with_ids) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << (with_ids ? "frame,x,y,score,object_id,cohort_id\n" : "frame,x,y,score\n");
  for (const auto& r : rows) {
    out << r.frame << ',' << fmt_double(r.x) << ',' << fmt_double(r.y) << ','
        << fmt_double(r.score);
    if (with_ids) out << ',' << r.object_id << ',' << r.cohort_id;
    out << '\n';
  }
}

std::vector<LinkRow> load_links(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  int lineno = 0;
  std::vector<LinkRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "frame,from_x,from_y,to_x,to_y,cohort_id,cost")
        throw std::runtime_error(path + ":1: unexpected header '" + line + "'");
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 7)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 7 fields");
    LinkRow r;
    r.frame = static_cast<int>(parse_long(f[0], path, lineno));
    r.from_x = parse_double(f[1], path, lineno);
    r.from_y = parse_double(f[2], path, lineno);
    r.to_x = parse_double(f[3], path, lineno);
    r.to_y = parse_double(f[4], path, lineno);
    r.cohort_id = static_cast<int>(parse_long(f[5], path, lineno));
    r.cost = parse_double(f[6], path, lineno);
    rows.push_back(r);
  }
  return rows;
}

void write_links(const std::string& path, const std::vector<LinkRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "frame,from_x,from_y,to_x,to_y,cohort_id,cost\n";
  for (const auto& r : rows)
    out << r.frame << ',' << fmt_double(r.from_x) << ',' << fmt_double(r.from_y)
        << ',' << fmt_double(r.to_x) << ',' << fmt_double(r.to_y) << ','
        << r.cohort_id << ',' << fmt_double(r.cost) << '\n';
}

void write_iters(const std::string& path, const std::vector<IterRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "frame,iter,links,total_cost,frac_changed\n";
  for (const auto& r : rows)
    out << r.frame << ',' << r.iter << ',' << r.links << ','
        << fmt_double(r.total_cost) << ',' << fmt_double(r.frac_changed) << '\n';
}

std::vector<CohortRow> load_cohorts(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  int lineno = 0;
  std::vector<CohortRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (lineno == 1) continue;
    const auto f = split_csv(line);
    if (f.size() != 9)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 9 fields");
    CohortRow r;
    r.frame = static_cast<int>(parse_long(f[0], path, lineno));
    r.cohort_id = static_cast<int>(parse_long(f[1], path, lineno));
    r.count = static_cast<int>(parse_long(f[2], path, lineno));
    r.centroid_x = parse_double(f[3], path, lineno);
    r.centroid_y = parse_double(f[4], path, lineno);
    r.mean_dir_rad = parse_double(f[5], path, lineno);
    r.mean_speed_px = parse_double(f[6], path, lineno);
    r.kappa = parse_double(f[7], path, lineno);
    r.weight = parse_double(f[8], path, lineno);
    rows.push_back(r);
  }
  return rows;
}

void write_cohorts(const std::string& path, const std::vector<CohortRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "frame,cohort_id,count,centroid_x,centroid_y,mean_dir_rad,"
         "mean_speed_px,kappa,weight\n";
  for (const auto& r : rows)
    out << r.frame << ',' << r.cohort_id << ',' << r.count << ','
        << fmt_double(r.centroid_x) << ',' << fmt_double(r.centroid_y) << ','
        << fmt_double(r.mean_dir_rad) << ',' << fmt_double(r.mean_speed_px)
        << ',' << fmt_double(r.kappa) << ',' << fmt_double(r.weight) << '\n';
}

}  // namespace ifta
