#include "ifta/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ifta {

namespace {

// Best-Fisher rejection sampler for vM(mu, kappa).
double sample_von_mises(std::mt19937_64& rng, double mu, double kappa) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (kappa < 1e-8) return wrap_angle(mu + (2.0 * unif(rng) - 1.0) * kPi);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double u1 = unif(rng);
    const double u2 = unif(rng);
    const double z = std::cos(kPi * u1);
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (std::log(std::max(c / u2, 1e-300)) + 1.0 - c >= 0.0) break;
  }
  const double u3 = unif(rng);
  const double theta = (u3 - 0.5 >= 0.0 ? 1.0 : -1.0) * std::acos(std::clamp(f, -1.0, 1.0));
  return wrap_angle(mu + theta);
}

double reflect(double v, double lo, double hi) {
  const double range = hi - lo;
  while (v < lo || v > hi) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
    if (range <= 0.0) return lo;
  }
  return v;
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.arena_w <= 0.0 || cfg.arena_h <= 0.0)
    throw std::invalid_argument("simulate: arena dimensions must be positive");
  if (cfg.n_frames < 1) throw std::invalid_argument("simulate: n_frames must be >= 1");
  if (cfg.walker_count < 0) throw std::invalid_argument("simulate: negative walker count");
  if (cfg.p_miss < 0.0 || cfg.p_miss >= 1.0)
    throw std::invalid_argument("simulate: p_miss must be in [0, 1)");
  if (cfg.clutter_rate < 0.0)
    throw std::invalid_argument("simulate: clutter_rate must be >= 0");
  if (cfg.step_sigma < 0.0)
    throw std::invalid_argument("simulate: step_sigma must be >= 0");
  for (const auto& c : cfg.cohorts) {
    if (c.count < 0) throw std::invalid_argument("simulate: negative cohort count");
    if (c.speed < 0.0) throw std::invalid_argument("simulate: negative cohort speed");
    if (c.heading_kappa < 0.0)
      throw std::invalid_argument("simulate: negative heading_kappa");
    if (c.onset_frame < 0 || c.onset_frame >= cfg.n_frames)
      throw std::invalid_argument("simulate: onset_frame must be in [0, n_frames)");
    if (c.spawn_x0 > c.spawn_x1 || c.spawn_y0 > c.spawn_y1 ||
        c.spawn_x0 < 0.0 || c.spawn_y0 < 0.0 || c.spawn_x1 > cfg.arena_w ||
        c.spawn_y1 > cfg.arena_h)
      throw std::invalid_argument("simulate: spawn region outside arena");
  }
}

}  // namespace

SimResult simulate(const ScenarioConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  struct Obj {
    double x, y;
    int cohort = -1;  // -1 walker
    long id = 0;
  };
  std::vector<Obj> objs;
  long next_id = 0;
  for (int i = 0; i < cfg.walker_count; ++i) {
    Obj o;
    o.x = unif(rng) * cfg.arena_w;
    o.y = unif(rng) * cfg.arena_h;
    o.id = next_id++;
    objs.push_back(o);
  }
  for (int c = 0; c < static_cast<int>(cfg.cohorts.size()); ++c) {
    const CohortSpec& cs = cfg.cohorts[c];
    for (int i = 0; i < cs.count; ++i) {
      Obj o;
      o.x = cs.spawn_x0 + unif(rng) * (cs.spawn_x1 - cs.spawn_x0);
      o.y = cs.spawn_y0 + unif(rng) * (cs.spawn_y1 - cs.spawn_y0);
      o.cohort = c;
      o.id = next_id++;
      objs.push_back(o);
    }
  }

  SimResult out;
  out.detections.resize(cfg.n_frames);
  for (int f = 0; f < cfg.n_frames; ++f) {
    if (f > 0) {
      for (Obj& o : objs) {
        if (o.cohort >= 0 && f >= cfg.cohorts[o.cohort].onset_frame) {
          const CohortSpec& cs = cfg.cohorts[o.cohort];
          const double h = sample_von_mises(rng, cs.direction, cs.heading_kappa);
          o.x += cs.speed * std::cos(h);
          o.y += cs.speed * std::sin(h);
        } else {
          o.x += cfg.step_sigma * gauss(rng);
          o.y += cfg.step_sigma * gauss(rng);
        }
        o.x = reflect(o.x, 0.0, cfg.arena_w);
        o.y = reflect(o.y, 0.0, cfg.arena_h);
      }
    }

    for (const Obj& o : objs) {
      const bool visible = cfg.p_miss <= 0.0 || unif(rng) >= cfg.p_miss;
      DetectionRow r;
      r.frame = f;
      r.x = o.x;
      r.y = o.y;
      r.score = 1.0;
      r.object_id = o.id;
      r.cohort_id = o.cohort;
      r.has_ids = true;
      out.trajectories.push_back(r);
      if (visible) {
        out.truth.push_back(r);
        out.detections[f].push_back({f, o.x, o.y, r.score});
      }
    }

    if (cfg.clutter_rate > 0.0) {
      std::poisson_distribution<int> pois(cfg.clutter_rate);
      const int n_clutter = pois(rng);
      for (int i = 0; i < n_clutter; ++i) {
        DetectionRow r;
        r.frame = f;
        r.x = unif(rng) * cfg.arena_w;
        r.y = unif(rng) * cfg.arena_h;
        r.score = 1.0;
        r.object_id = -1;
        r.cohort_id = -1;
        r.has_ids = true;
        out.truth.push_back(r);
        out.detections[f].push_back({f, r.x, r.y, r.score});
      }
    }
  }
  return out;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"interdigitated", "onset",
                                                 "multi-gate", "sparse"};
  return names;
}

ScenarioConfig preset_scenario(const std::string& name) {
  ScenarioConfig cfg;
  if (name == "interdigitated") {
    // Two anti-parallel cohorts with overlapping spawn bands.
    cfg.arena_w = 600.0;
    cfg.arena_h = 400.0;
    cfg.n_frames = 12;
    cfg.walker_count = 0;
    cfg.step_sigma = 1.0;
    cfg.p_miss = 0.05;
    cfg.cohorts.push_back({100, 0.0, 6.0, 8.0, 40, 60, 340, 340, 0});
    cfg.cohorts.push_back({100, kPi, 6.0, 8.0, 260, 60, 560, 340, 0});
  } else if (name == "onset") {
    // One cohort of 20 starts moving at frame 10 amid 500 walkers.
    cfg.arena_w = 1500.0;
    cfg.arena_h = 1500.0;
    cfg.n_frames = 25;
    cfg.walker_count = 500;
    cfg.step_sigma = 1.5;
    cfg.p_miss = 0.0;
    cfg.cohorts.push_back({20, 0.6, 4.0, 16.0, 500, 500, 1000, 1000, 10});
  } else if (name == "multi-gate") {
    // Three cohorts whose straight-line paths intersect mid-arena.
    cfg.arena_w = 800.0;
    cfg.arena_h = 800.0;
    cfg.n_frames = 15;
    cfg.walker_count = 60;
    cfg.step_sigma = 1.5;
    cfg.p_miss = 0.02;
    const double d2 = 2.0 * kPi / 3.0, d3 = -2.0 * kPi / 3.0;
    cfg.cohorts.push_back({60, 0.0, 5.0, 10.0, 50, 300, 250, 500, 0});
    cfg.cohorts.push_back({60, d2, 5.0, 10.0, 425, 84, 625, 284, 0});
    cfg.cohorts.push_back({60, d3, 5.0, 10.0, 425, 516, 625, 716, 0});
  } else if (name == "sparse") {
    // Density low enough to engage sliding-window pooling.
    cfg.arena_w = 1200.0;
    cfg.arena_h = 1200.0;
    cfg.n_frames = 20;
    cfg.walker_count = 15;
    cfg.step_sigma = 1.5;
    cfg.p_miss = 0.0;
    cfg.cohorts.push_back({10, 2.2, 4.0, 8.0, 300, 300, 900, 900, 0});
  } else {
    std::string msg = "unknown preset '" + name + "'; valid presets:";
    for (const auto& p : preset_names()) msg += " " + p;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

}  // namespace ifta
