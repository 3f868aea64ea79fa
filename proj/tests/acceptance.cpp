// Acceptance gate: one pass/fail line per criterion, exit code = number
// of failed criteria. Everything here is checked against independent
// oracles (exhaustive enumeration, closed forms, or the simulator's
// ground truth), not against the library's own outputs.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifta/alert.hpp"
#include "ifta/assignment.hpp"
#include "ifta/circular.hpp"
#include "ifta/config.hpp"
#include "ifta/detect.hpp"
#include "ifta/eval.hpp"
#include "ifta/linker.hpp"
#include "ifta/mrf.hpp"
#include "ifta/pipeline.hpp"
#include "ifta/render.hpp"
#include "ifta/sim.hpp"

using namespace ifta;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("criterion %2d [%s]: %s%s%s\n", idx, name,
              pass ? "PASS" : "FAIL", detail.empty() ? "" : " -- ",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---- 1: exact assignment ----------------------------------------------

// Bitmask DP over right nodes: the true optimum of sum(lambda - cost).
double dp_optimum(int n_left, int n_right,
                  const std::vector<std::vector<double>>& cost, double lambda) {
  std::vector<double> f(size_t(1) << n_right, -1.0);
  f[0] = 0.0;
  double best = 0.0;
  for (int i = 0; i < n_left; ++i) {
    std::vector<double> g = f;  // leaving node i unmatched
    for (size_t mask = 0; mask < f.size(); ++mask) {
      if (f[mask] < 0.0) continue;
      for (int j = 0; j < n_right; ++j) {
        if (mask & (size_t(1) << j)) continue;
        const double v = f[mask] + lambda - cost[i][j];
        auto& slot = g[mask | (size_t(1) << j)];
        if (v > slot) slot = v;
      }
    }
    f = std::move(g);
  }
  for (double v : f) best = std::max(best, v);
  return best;
}

void criterion_solver() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (uint64_t seed = 0; seed < 200 && pass; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uc(0.0, 1.0);
    const int nl = 1 + int(rng() % 6), nr = 1 + int(rng() % 6);
    std::vector<std::vector<double>> cost(nl, std::vector<double>(nr));
    std::vector<AssignEdge> edges;
    for (int i = 0; i < nl; ++i)
      for (int j = 0; j < nr; ++j) {
        cost[i][j] = uc(rng);
        edges.push_back({i, j, cost[i][j]});
      }
    const double lambda = 0.8;
    const auto sol = solve_assignment(nl, nr, edges, lambda);
    const double got = sol.link_count() * lambda - sol.total_cost;
    const double want = dp_optimum(nl, nr, cost, lambda);
    if (std::abs(got - want) > 1e-9) {
      pass = false;
      detail = "seed " + std::to_string(seed) + ": objective " + fmt(got) +
               " vs optimum " + fmt(want);
    }
  }
  const double dt = seconds_since(t0);
  if (pass && dt >= 10.0) {
    pass = false;
    detail = "200 instances took " + fmt(dt) + " s (budget 10 s)";
  }
  if (pass) detail = "200 instances exact in " + fmt(dt) + " s";
  report(1, "exact one-to-one assignment", pass, detail);
}

// ---- 2: Pareto frontier -------------------------------------------------

void criterion_pareto() {
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> up(0.0, 120.0), uc(0.0, 1.0);
  for (int trial = 0; trial < 30 && pass; ++trial) {
    std::vector<Detection> a(25), b(25);
    for (auto& d : a) d = {0, up(rng), up(rng), 1.0};
    for (auto& d : b) d = {1, up(rng), up(rng), 1.0};
    const auto cands = gen_candidates(a, b, 25.0);
    if (cands.empty()) continue;
    std::vector<CostBreakdown> costs(cands.size());
    for (auto& c : costs) c.total = uc(rng);
    const auto grid = default_lambda_grid(costs, 16);
    const auto res = pareto_select(25, 25, cands, costs, grid);
    for (size_t i = 1; i < res.frontier.points.size(); ++i)
      if (res.frontier.points[i].link_count <
          res.frontier.points[i - 1].link_count) {
        pass = false;
        detail = "link count decreased along the lambda grid";
      }
  }
  if (pass) {
    // Single candidate of cost 0.2: the utopia rule must take the link.
    const std::vector<CandidateLink> cands = {{0, 0, 3.0, 0.0, -1}};
    std::vector<CostBreakdown> costs(1);
    costs[0].total = 0.2;
    const std::vector<double> grid = {0.05, 0.1, 0.3, 0.6, 1.0};
    const auto res = pareto_select(1, 1, cands, costs, grid);
    if (res.solution.link_count() != 1 ||
        std::abs(res.solution.total_cost - 0.2) > 1e-12) {
      pass = false;
      detail = "single-candidate utopia selection missed the 1-link point";
    }
  }
  report(2, "pareto monotonicity and utopia selection", pass, detail);
}

// ---- 3: reweighting convergence ----------------------------------------

void criterion_convergence() {
  const auto t0 = Clock::now();
  int ok = 0, total = 0;
  for (const char* preset : {"interdigitated", "multi-gate"}) {
    for (uint64_t seed = 1; seed <= 25; ++seed) {
      auto scen = preset_scenario(preset);
      scen.seed = seed;
      const auto sim = simulate(scen);
      RunConfig cfg;
      const auto res = track_sequence(sim.detections, cfg.tracker_config());
      // Per frame step: converged (<5% changed) by iteration 4.
      std::vector<int> conv_iter(res.steps.size(), 1000);
      for (const auto& row : res.iterations)
        if (row.frac_changed < 0.05)
          conv_iter[row.frame] = std::min(conv_iter[row.frame], row.iter);
      bool run_ok = true;
      for (int ci : conv_iter)
        if (ci > 4) run_ok = false;
      ok += run_ok ? 1 : 0;
      ++total;
    }
  }
  const double dt = seconds_since(t0);
  bool pass = ok >= int(0.9 * total) && dt < 120.0;
  report(3, "reweighting converges within 4 iterations",
         pass,
         std::to_string(ok) + "/" + std::to_string(total) + " runs, " +
             fmt(dt) + " s");
}

// ---- 4: interdigitated accuracy ----------------------------------------

void criterion_interdigitated() {
  std::vector<double> prec, rec, cnt_err, dir_err;
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    RunConfig cfg;
    cfg.sim = preset_scenario("interdigitated");
    cfg.sim.seed = seed;
    const auto sim = simulate(cfg.sim);
    const auto out = run_pipeline(sim.detections, cfg);
    const auto rep = evaluate(out.links, out.reports, sim.truth);
    prec.push_back(rep.link_precision);
    rec.push_back(rep.link_recall);
    cnt_err.push_back(std::abs(rep.cohort_count_error));
    dir_err.push_back(rep.mean_direction_error_deg);
  }
  const double p = median(prec), r = median(rec), c = median(cnt_err),
               d = median(dir_err);
  const bool pass = p >= 0.95 && r >= 0.90 && c == 0.0 && d <= 5.0;
  report(4, "interdigitated flows recovered", pass,
         "median precision " + fmt(p) + ", recall " + fmt(r) +
             ", count error " + fmt(c) + ", direction error " + fmt(d) +
             " deg (30 seeds)");
}

// ---- 5: onset latency ----------------------------------------------------

void criterion_onset() {
  int ok = 0;
  std::vector<double> step_times;
  const int n_runs = 50;
  for (uint64_t seed = 1; seed <= n_runs; ++seed) {
    RunConfig cfg;
    cfg.sim = preset_scenario("onset");
    cfg.sim.seed = seed;
    const int onset = cfg.sim.cohorts.at(0).onset_frame;
    const auto sim = simulate(cfg.sim);
    const auto t0 = Clock::now();
    const auto out = run_pipeline(sim.detections, cfg);
    const double dt = seconds_since(t0);
    const int n_steps = int(sim.detections.size()) - 1;
    if (n_steps > 0) step_times.push_back(dt / n_steps);
    const auto rep = evaluate(out.links, out.reports, sim.truth, onset);
    if (rep.onset_detected && rep.onset_latency_frames <= 4) ++ok;
  }
  const double med_step = median(step_times);
  const bool pass = ok >= int(0.9 * n_runs) && med_step < 1.0;
  report(5, "onset reported within 4 frames", pass,
         std::to_string(ok) + "/" + std::to_string(n_runs) +
             " runs, median frame step " + fmt(med_step) + " s");
}

// ---- 6: 4000 detections per frame ---------------------------------------

long vm_peak_mb() {
  std::ifstream f("/proc/self/status");
  std::string line;
  while (std::getline(f, line))
    if (line.rfind("VmPeak:", 0) == 0) {
      long kb = 0;
      std::sscanf(line.c_str(), "VmPeak: %ld", &kb);
      return kb / 1024;
    }
  return -1;
}

void criterion_scale() {
  ScenarioConfig scen;
  scen.arena_w = 2000.0;
  scen.arena_h = 2000.0;
  scen.n_frames = 4;
  scen.seed = 3;
  scen.walker_count = 3900;
  scen.step_sigma = 1.5;
  CohortSpec c;
  c.count = 100;
  c.direction = 0.5;
  c.speed = 4.0;
  c.heading_kappa = 10.0;
  c.spawn_x0 = 200.0; c.spawn_y0 = 200.0;
  c.spawn_x1 = 900.0; c.spawn_y1 = 900.0;
  scen.cohorts.push_back(c);
  const auto sim = simulate(scen);
  size_t max_per_frame = 0;
  for (const auto& fr : sim.detections) max_per_frame = std::max(max_per_frame, fr.size());

  std::vector<double> per_step;
  RunConfig cfg;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    const auto out = run_pipeline(sim.detections, cfg);
    const double dt = seconds_since(t0);
    per_step.push_back(dt / double(sim.detections.size() - 1));
    if (out.links.empty()) per_step.back() = 1e9;  // something went wrong
  }
  const double med = median(per_step);
  const long peak = vm_peak_mb();
  const bool pass = max_per_frame >= 4000 && med < 1.0 &&
                    (peak < 0 || peak < 1024);
  report(6, "4000 detections per frame in under a second", pass,
         std::to_string(max_per_frame) + " detections/frame, median step " +
             fmt(med) + " s, peak memory " + std::to_string(peak) + " MB");
}

// ---- 7: von Mises machinery ----------------------------------------------

void criterion_von_mises() {
  bool pass = true;
  std::string detail;
  for (double r = 0.05; r <= 0.951; r += 0.05) {
    const double kh = kappa_from_rbar(r);
    if (std::abs(bessel_i1_over_i0(kh) - r) > 0.05) {
      pass = false;
      detail = "kappa inversion off at rbar=" + fmt(r);
    }
  }
  // Monotone log-likelihood within every EM segment.
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g1(0.0, 0.35), g2(0.0, 0.3);
  for (uint64_t seed = 0; seed < 20 && pass; ++seed) {
    std::vector<double> a;
    for (int i = 0; i < 120; ++i) a.push_back(wrap_angle(0.4 + g1(rng)));
    for (int i = 0; i < 90; ++i) a.push_back(wrap_angle(-1.9 + g2(rng)));
    const auto fit = vm_mixture_em(a, 4, 0.02, seed);
    for (const auto& seg : fit.loglik_segments)
      for (size_t i = 1; i < seg.size(); ++i)
        if (seg[i] < seg[i - 1] - 1e-9 * std::max(1.0, std::abs(seg[i - 1]))) {
          pass = false;
          detail = "log-likelihood decreased within a segment";
        }
  }
  // 3-component recovery rate.
  int recovered = 0;
  const double mus[3] = {0.0, 2.0 * kPi / 3.0, -2.0 * kPi / 3.0};
  std::normal_distribution<double> gk(0.0, 1.0 / std::sqrt(12.0));
  for (uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 r2(seed + 1000);
    std::vector<double> a;
    for (double m : mus)
      for (int i = 0; i < 150; ++i) a.push_back(wrap_angle(m + gk(r2)));
    const auto fit = vm_mixture_em(a, 5, 0.02, seed);
    if (fit.components.size() != 3) continue;
    bool all = true;
    std::vector<bool> used(3, false);
    for (const auto& comp : fit.components) {
      bool matched = false;
      for (int j = 0; j < 3; ++j)
        if (!used[j] && std::abs(angular_diff(comp.mu, mus[j])) < 0.2) {
          used[j] = true;
          matched = true;
          break;
        }
      all = all && matched;
    }
    if (all) ++recovered;
  }
  if (pass && recovered < 90) {
    pass = false;
    detail = "3-component recovery " + std::to_string(recovered) + "/100";
  }
  if (pass)
    detail = "inversion ok, EM monotone, recovery " +
             std::to_string(recovered) + "/100";
  report(7, "von mises estimation and EM", pass, detail);
}

// ---- 8: MRF regularization ------------------------------------------------

double mrf_data_term(double theta, const VonMisesComponent& c) {
  return -std::log(c.weight) - c.kappa * std::cos(theta - c.mu) +
         log_bessel_i0(c.kappa);
}

double potts_energy(const std::vector<double>& angles,
                    const std::vector<VonMisesComponent>& mix,
                    const NeighborGraph& g, double beta,
                    const std::vector<int>& labels) {
  double e = 0.0;
  for (size_t i = 0; i < angles.size(); ++i)
    e += mrf_data_term(angles[i], mix[labels[i]]);
  for (const auto& [a, b] : g.edges)
    if (labels[a] != labels[b]) e += beta;
  return e;
}

void criterion_mrf() {
  bool pass = true;
  std::string detail;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-kPi, kPi);

  // 5-node exhaustive oracle.
  for (int trial = 0; trial < 50 && pass; ++trial) {
    std::vector<double> angles(5);
    for (auto& a : angles) a = u(rng);
    std::vector<VonMisesComponent> mix = {{u(rng), 3.0, 0.5},
                                          {u(rng), 5.0, 0.3},
                                          {u(rng), 2.0, 0.2}};
    NeighborGraph g;
    g.n_nodes = 5;
    g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 2}};
    const auto res = mrf_relabel(angles, mix, g, 0.9);
    if (res.energy_after > res.energy_before + 1e-9) {
      pass = false;
      detail = "energy increased";
      break;
    }
    double best = 1e300;
    std::vector<int> l(5, 0);
    for (int code = 0; code < 243; ++code) {
      int cc = code;
      for (int i = 0; i < 5; ++i) { l[i] = cc % 3; cc /= 3; }
      best = std::min(best, potts_energy(angles, mix, g, 0.9, l));
    }
    if (std::abs(res.energy_after - best) > 1e-9) {
      pass = false;
      detail = "brute-force energy mismatch: " + fmt(res.energy_after) +
               " vs " + fmt(best);
    }
  }

  // Sparse labeling: regularized error no worse than the beta=0 baseline.
  if (pass) {
    std::vector<double> err_mrf, err_base;
    for (uint64_t seed = 1; seed <= 30; ++seed) {
      std::mt19937_64 r2(seed);
      std::normal_distribution<double> noise(0.0, 0.7);
      std::uniform_real_distribution<double> jitter(-2.0, 2.0);
      std::vector<double> angles;
      std::vector<FlowVector> vecs;
      std::vector<int> truth;
      for (int i = 0; i < 30; ++i) {
        const double th = wrap_angle(0.0 + noise(r2));
        angles.push_back(th);
        truth.push_back(0);
        vecs.push_back({0, double(i % 6) * 10.0 + jitter(r2),
                        double(i / 6) * 10.0 + jitter(r2), std::cos(th),
                        std::sin(th)});
      }
      for (int i = 0; i < 30; ++i) {
        const double th = wrap_angle(kPi + noise(r2));
        angles.push_back(th);
        truth.push_back(1);
        vecs.push_back({0, 300.0 + double(i % 6) * 10.0 + jitter(r2),
                        double(i / 6) * 10.0 + jitter(r2), std::cos(th),
                        std::sin(th)});
      }
      const std::vector<VonMisesComponent> mix = {{0.0, 2.0, 0.5},
                                                  {kPi, 2.0, 0.5}};
      const auto g = build_neighbor_graph(vecs, 6, 25.0);
      const auto reg = mrf_relabel(angles, mix, g, 1.5);
      const auto base = mrf_relabel(angles, mix, g, 0.0);
      auto error = [&](const std::vector<int>& l) {
        int wrong = 0;
        for (size_t i = 0; i < l.size(); ++i) wrong += l[i] != truth[i];
        return double(wrong) / double(l.size());
      };
      err_mrf.push_back(error(reg.labels));
      err_base.push_back(error(base.labels));
    }
    const double em = median(err_mrf), eb = median(err_base);
    if (em > eb + 1e-12) {
      pass = false;
      detail = "regularized error " + fmt(em) + " worse than baseline " + fmt(eb);
    } else {
      detail = "oracle matched; labeling error " + fmt(em) +
               " vs baseline " + fmt(eb);
    }
  }
  report(8, "mrf relabeling energy and quality", pass, detail);
}

// ---- 9: detector -----------------------------------------------------------

void criterion_detector() {
  DetectorConfig cfg;
  bool pass = cfg.ratio == 1.1;
  std::string detail = pass ? "" : "default sigma ratio is not 1.1";

  if (pass) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(12.0, 388.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    ImageGrid img = ImageGrid::zeros(400, 400);
    for (auto& v : img.values) v = noise(rng);
    std::vector<std::pair<double, double>> truth;
    while (truth.size() < 60) {
      const double x = ux(rng), y = ux(rng);
      bool clear = true;
      for (const auto& [tx, ty] : truth)
        if (std::hypot(x - tx, y - ty) < 14.0) clear = false;
      if (!clear) continue;
      truth.emplace_back(x, y);
      for (int dy = -8; dy <= 8; ++dy)
        for (int dx = -8; dx <= 8; ++dx)
          img.at(int(x) + dx, int(y) + dy) +=
              40.0 * std::exp(-(std::pow(int(x) + dx - x, 2) +
                                std::pow(int(y) + dy - y, 2)) /
                              (2.0 * 2.0 * 2.0));
    }
    const auto dets = detect_features(dog_filter(img, cfg), cfg);
    int tp = 0;
    double worst_loc = 0.0;
    for (const auto& [tx, ty] : truth) {
      double best = 1e9;
      for (const auto& d : dets) best = std::min(best, std::hypot(d.x - tx, d.y - ty));
      if (best <= 1.0) {
        ++tp;
        worst_loc = std::max(worst_loc, best);
      }
    }
    const double recall = tp / double(truth.size());
    const double precision = dets.empty() ? 1.0 : double(tp) / double(dets.size());
    pass = recall >= 0.95 && precision >= 0.95 && worst_loc <= 1.0;
    detail = "precision " + fmt(precision) + ", recall " + fmt(recall) +
             ", worst localization " + fmt(worst_loc) + " px";
  }
  report(9, "difference-of-gaussians detector", pass, detail);
}

// ---- 10: determinism and formats -------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void criterion_determinism() {
  bool pass = true;
  std::string detail;
  const auto base = fs::temp_directory_path() / "ifta_acceptance";
  fs::remove_all(base);

  RunConfig cfg;
  cfg.sim = preset_scenario("interdigitated");
  cfg.sim.seed = 11;
  const auto sim = simulate(cfg.sim);
  const auto out1 = run_pipeline(sim.detections, cfg);
  const auto out2 = run_pipeline(sim.detections, cfg);
  write_outputs(out1, cfg, (base / "a").string());
  write_outputs(out2, cfg, (base / "b").string());
  for (const char* n : {"links.csv", "cohorts.csv", "iterations.csv",
                        "alerts.jsonl", "density.csv", "config.txt"}) {
    if (slurp(base / "a" / n) != slurp(base / "b" / n)) {
      pass = false;
      detail = std::string(n) + " differs between identical runs";
    }
  }

  // Lossless parse-back: reload then rewrite must be byte-identical.
  if (pass) {
    const auto links = load_links((base / "a" / "links.csv").string());
    write_links((base / "rt_links.csv").string(), links);
    if (slurp(base / "a" / "links.csv") != slurp(base / "rt_links.csv")) {
      pass = false;
      detail = "links.csv round-trip not lossless";
    }
    const auto cohorts = load_cohorts((base / "a" / "cohorts.csv").string());
    write_cohorts((base / "rt_cohorts.csv").string(), cohorts);
    if (pass &&
        slurp(base / "a" / "cohorts.csv") != slurp(base / "rt_cohorts.csv")) {
      pass = false;
      detail = "cohorts.csv round-trip not lossless";
    }
  }

  // Alert JSONL lines parse as JSON and re-serialize identically.
  if (pass) {
    std::ifstream f(base / "a" / "alerts.jsonl");
    std::string line;
    while (pass && std::getline(f, line)) {
      if (line.empty()) continue;
      const auto js = nlohmann::json::parse(line, nullptr, false);
      if (js.is_discarded()) {
        pass = false;
        detail = "alerts.jsonl line is not valid JSON";
        break;
      }
      AlertEvent ev;
      ev.frame_issued = js.at("frame_issued").get<int>();
      ev.cohort_id = js.at("cohort_id").get<int>();
      ev.location_id = js.at("location_id").get<std::string>();
      ev.eta_seconds = js.at("eta_seconds").get<double>();
      ev.count = js.at("count").get<int>();
      ev.approach_angle_deg = js.at("approach_angle_deg").get<double>();
      if (alert_to_json(ev) != line) {
        pass = false;
        detail = "alerts.jsonl round-trip not lossless";
      }
    }
  }

  // SVG carries link coordinates verbatim.
  if (pass && !out1.links.empty()) {
    const auto& l = out1.links.front();
    const auto svg = render_frame_svg(out1.links, l.frame, out1.arena_w,
                                      out1.arena_h, {});
    if (svg.find("x1=\"" + fmt_double(l.from_x) + "\"") == std::string::npos ||
        svg.find("y2=\"" + fmt_double(l.to_y) + "\"") == std::string::npos) {
      pass = false;
      detail = "svg does not carry link coordinates verbatim";
    }
  }
  fs::remove_all(base);
  report(10, "determinism and lossless formats", pass, detail);
}

}  // namespace

int main() {
  criterion_solver();
  criterion_pareto();
  criterion_convergence();
  criterion_interdigitated();
  criterion_onset();
  criterion_scale();
  criterion_von_mises();
  criterion_mrf();
  criterion_detector();
  criterion_determinism();
  std::printf("%s: %d/10 criteria passed\n",
              g_failures == 0 ? "ALL PASS" : "FAILURES",
              10 - g_failures);
  return g_failures;
}
