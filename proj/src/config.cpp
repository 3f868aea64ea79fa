#include "ifta/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ifta/io.hpp"

namespace ifta {

TrackerConfig RunConfig::tracker_config() const {
  TrackerConfig t;
  t.calib = calib;
  t.lambda_grid_size = lambda_grid_size;
  t.max_iterations = max_iterations;
  t.convergence_frac = convergence_frac;
  t.freeze_frac = freeze_frac;
  t.weight_epsilon = weight_epsilon;
  t.var_floor = var_floor;
  t.k_max = k_max;
  t.w_min = w_min;
  t.seed = seed;
  return t;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer value for " + key + ": '" + v + "'");
  }
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// Parses "sim.cohort.N.field"; returns field name and fills *idx.
bool parse_cohort_key(const std::string& key, int* idx, std::string* field) {
  const std::string prefix = "sim.cohort.";
  if (key.rfind(prefix, 0) != 0) return false;
  const size_t dot = key.find('.', prefix.size());
  if (dot == std::string::npos) return false;
  try {
    *idx = std::stoi(key.substr(prefix.size(), dot - prefix.size()));
  } catch (const std::exception&) {
    return false;
  }
  *field = key.substr(dot + 1);
  return true;
}

}  // namespace

void apply_config_line(const std::string& key, const std::string& value,
                       RunConfig* cfg) {
  const std::string k = trim(key), v = trim(value);

  if (k == "calib.meters_per_pixel") cfg->calib.meters_per_pixel = to_double(k, v);
  else if (k == "calib.fps") cfg->calib.fps = to_double(k, v);
  else if (k == "calib.v_max_mps") cfg->calib.v_max_mps = to_double(k, v);
  else if (k == "detector.sigma1") cfg->detector.sigma1 = to_double(k, v);
  else if (k == "detector.ratio") cfg->detector.ratio = to_double(k, v);
  else if (k == "detector.k_thresh") cfg->detector.k_thresh = to_double(k, v);
  else if (k == "linker.lambda_grid_size") cfg->lambda_grid_size = static_cast<int>(to_long(k, v));
  else if (k == "linker.max_iterations") cfg->max_iterations = static_cast<int>(to_long(k, v));
  else if (k == "linker.convergence_frac") cfg->convergence_frac = to_double(k, v);
  else if (k == "linker.freeze_frac") cfg->freeze_frac = to_double(k, v);
  else if (k == "linker.weight_epsilon") cfg->weight_epsilon = to_double(k, v);
  else if (k == "linker.var_floor") cfg->var_floor = to_double(k, v);
  else if (k == "cohort.k_max") cfg->k_max = static_cast<int>(to_long(k, v));
  else if (k == "cohort.w_min") cfg->w_min = to_double(k, v);
  else if (k == "cohort.beta") cfg->beta = to_double(k, v);
  else if (k == "cohort.k_nn") cfg->k_nn = static_cast<int>(to_long(k, v));
  else if (k == "cohort.radius_scale") cfg->radius_scale = to_double(k, v);
  else if (k == "cohort.density_floor") cfg->density_floor = to_double(k, v);
  else if (k == "cohort.pool_threshold") cfg->pool_threshold = to_double(k, v);
  else if (k == "alert.min_members") cfg->alert.min_members = static_cast<int>(to_long(k, v));
  else if (k == "alert.r_min") cfg->alert.r_min = to_double(k, v);
  else if (k == "alert.angle_tol_deg") cfg->alert.angle_tol_deg = to_double(k, v);
  else if (k == "alert.eta_realert_frac") cfg->alert.eta_realert_frac = to_double(k, v);
  else if (k == "alert.realert_frames") cfg->alert.realert_frames = static_cast<int>(to_long(k, v));
  else if (k == "alert.locations_path") cfg->locations_path = v;
  else if (k == "sim.arena_w") cfg->sim.arena_w = to_double(k, v);
  else if (k == "sim.arena_h") cfg->sim.arena_h = to_double(k, v);
  else if (k == "sim.n_frames") cfg->sim.n_frames = static_cast<int>(to_long(k, v));
  else if (k == "sim.walkers") cfg->sim.walker_count = static_cast<int>(to_long(k, v));
  else if (k == "sim.step_sigma") cfg->sim.step_sigma = to_double(k, v);
  else if (k == "sim.p_miss") cfg->sim.p_miss = to_double(k, v);
  else if (k == "sim.clutter_rate") cfg->sim.clutter_rate = to_double(k, v);
  else if (k == "sim.cohorts") cfg->sim.cohorts.resize(to_long(k, v));
  else if (k == "io.detections") cfg->detections_path = v;
  else if (k == "io.frames_dir") cfg->frames_dir = v;
  else if (k == "density.cell_px") cfg->density_cell_px = to_double(k, v);
  else if (k == "seed") cfg->seed = static_cast<uint64_t>(to_long(k, v));
  else {
    int idx = 0;
    std::string field;
    if (parse_cohort_key(k, &idx, &field)) {
      if (idx < 0 || idx >= static_cast<int>(cfg->sim.cohorts.size()))
        throw std::runtime_error("config: cohort index out of range in " + k +
                                 " (set sim.cohorts first)");
      CohortSpec& cs = cfg->sim.cohorts[idx];
      if (field == "count") cs.count = static_cast<int>(to_long(k, v));
      else if (field == "direction") cs.direction = to_double(k, v);
      else if (field == "speed") cs.speed = to_double(k, v);
      else if (field == "kappa") cs.heading_kappa = to_double(k, v);
      else if (field == "onset") cs.onset_frame = static_cast<int>(to_long(k, v));
      else if (field == "spawn") {
        std::stringstream ss(v);
        if (!(ss >> cs.spawn_x0 >> cs.spawn_y0 >> cs.spawn_x1 >> cs.spawn_y1))
          throw std::runtime_error("config: spawn needs 4 numbers in " + k);
      } else {
        throw std::runtime_error("config: unknown cohort field in key " + k);
      }
    } else {
      throw std::runtime_error("config: unknown key '" + k + "'");
    }
  }
}

void apply_config_file(const std::string& path, RunConfig* cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    apply_config_line(t.substr(0, eq), t.substr(eq + 1), cfg);
  }
}

std::string config_to_string(const RunConfig& cfg) {
  std::ostringstream os;
  os << "calib.meters_per_pixel = " << fmt_double(cfg.calib.meters_per_pixel) << "\n"
     << "calib.fps = " << fmt_double(cfg.calib.fps) << "\n"
     << "calib.v_max_mps = " << fmt_double(cfg.calib.v_max_mps) << "\n"
     << "detector.sigma1 = " << fmt_double(cfg.detector.sigma1) << "\n"
     << "detector.ratio = " << fmt_double(cfg.detector.ratio) << "\n"
     << "detector.k_thresh = " << fmt_double(cfg.detector.k_thresh) << "\n"
     << "linker.lambda_grid_size = " << cfg.lambda_grid_size << "\n"
     << "linker.max_iterations = " << cfg.max_iterations << "\n"
     << "linker.convergence_frac = " << fmt_double(cfg.convergence_frac) << "\n"
     << "linker.freeze_frac = " << fmt_double(cfg.freeze_frac) << "\n"
     << "linker.weight_epsilon = " << fmt_double(cfg.weight_epsilon) << "\n"
     << "linker.var_floor = " << fmt_double(cfg.var_floor) << "\n"
     << "cohort.k_max = " << cfg.k_max << "\n"
     << "cohort.w_min = " << fmt_double(cfg.w_min) << "\n"
     << "cohort.beta = " << fmt_double(cfg.beta) << "\n"
     << "cohort.k_nn = " << cfg.k_nn << "\n"
     << "cohort.radius_scale = " << fmt_double(cfg.radius_scale) << "\n"
     << "cohort.density_floor = " << fmt_double(cfg.density_floor) << "\n"
     << "cohort.pool_threshold = " << fmt_double(cfg.pool_threshold) << "\n"
     << "alert.min_members = " << cfg.alert.min_members << "\n"
     << "alert.r_min = " << fmt_double(cfg.alert.r_min) << "\n"
     << "alert.angle_tol_deg = " << fmt_double(cfg.alert.angle_tol_deg) << "\n"
     << "alert.eta_realert_frac = " << fmt_double(cfg.alert.eta_realert_frac) << "\n"
     << "alert.realert_frames = " << cfg.alert.realert_frames << "\n";
  if (!cfg.locations_path.empty())
    os << "alert.locations_path = " << cfg.locations_path << "\n";
  os << "sim.arena_w = " << fmt_double(cfg.sim.arena_w) << "\n"
     << "sim.arena_h = " << fmt_double(cfg.sim.arena_h) << "\n"
     << "sim.n_frames = " << cfg.sim.n_frames << "\n"
     << "sim.walkers = " << cfg.sim.walker_count << "\n"
     << "sim.step_sigma = " << fmt_double(cfg.sim.step_sigma) << "\n"
     << "sim.p_miss = " << fmt_double(cfg.sim.p_miss) << "\n"
     << "sim.clutter_rate = " << fmt_double(cfg.sim.clutter_rate) << "\n"
     << "sim.cohorts = " << cfg.sim.cohorts.size() << "\n";
  for (size_t i = 0; i < cfg.sim.cohorts.size(); ++i) {
    const CohortSpec& cs = cfg.sim.cohorts[i];
    const std::string p = "sim.cohort." + std::to_string(i) + ".";
    os << p << "count = " << cs.count << "\n"
       << p << "direction = " << fmt_double(cs.direction) << "\n"
       << p << "speed = " << fmt_double(cs.speed) << "\n"
       << p << "kappa = " << fmt_double(cs.heading_kappa) << "\n"
       << p << "onset = " << cs.onset_frame << "\n"
       << p << "spawn = " << fmt_double(cs.spawn_x0) << " "
       << fmt_double(cs.spawn_y0) << " " << fmt_double(cs.spawn_x1) << " "
       << fmt_double(cs.spawn_y1) << "\n";
  }
  if (!cfg.detections_path.empty())
    os << "io.detections = " << cfg.detections_path << "\n";
  if (!cfg.frames_dir.empty()) os << "io.frames_dir = " << cfg.frames_dir << "\n";
  os << "density.cell_px = " << fmt_double(cfg.density_cell_px) << "\n"
     << "seed = " << cfg.seed << "\n";
  return os.str();
}

}  // namespace ifta
