#include "ifta/linker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace ifta {

std::vector<CandidateLink> gen_candidates(std::span<const Detection> frame_t,
                                          std::span<const Detection> frame_t1,
                                          double max_disp_px) {
  if (!(max_disp_px > 0.0))
    throw std::invalid_argument("gen_candidates: max_disp_px must be > 0");
  std::vector<CandidateLink> out;
  if (frame_t.empty() || frame_t1.empty()) return out;

  // Uniform grid over frame t+1 with cell size = gate radius; each
  // detection in frame t scans its 3x3 cell neighborhood.
  const double cell = max_disp_px;
  auto key = [cell](double x, double y) {
    const long cx = static_cast<long>(std::floor(x / cell));
    const long cy = static_cast<long>(std::floor(y / cell));
    return (cx << 24) ^ (cy & 0xffffff);
  };
  std::unordered_map<long, std::vector<int>> grid;
  for (int j = 0; j < static_cast<int>(frame_t1.size()); ++j)
    grid[key(frame_t1[j].x, frame_t1[j].y)].push_back(j);

  const double gate2 = max_disp_px * max_disp_px;
  for (int i = 0; i < static_cast<int>(frame_t.size()); ++i) {
    const Detection& a = frame_t[i];
    for (int ox = -1; ox <= 1; ++ox)
      for (int oy = -1; oy <= 1; ++oy) {
        const auto it = grid.find(key(a.x + ox * cell, a.y + oy * cell));
        if (it == grid.end()) continue;
        for (int j : it->second) {
          const double dx = frame_t1[j].x - a.x;
          const double dy = frame_t1[j].y - a.y;
          if (dx * dx + dy * dy <= gate2)
            out.push_back({i, j, dx, dy, -1});
        }
      }
  }
  std::sort(out.begin(), out.end(), [](const CandidateLink& a, const CandidateLink& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  return out;
}

CostBreakdown link_cost(const std::optional<std::pair<double, double>>& pred_disp,
                        std::pair<double, double> link_disp,
                        std::span<const VonMisesComponent> cohort,
                        const Weights& w) {
  CostBreakdown c;
  const double d2 = std::hypot(link_disp.first, link_disp.second);

  if (pred_disp) {
    const double d1 = std::hypot(pred_disp->first, pred_disp->second);
    if (d1 + d2 > 0.0) c.c_eq = 1.0 - 2.0 * std::sqrt(d1 * d2) / (d1 + d2);
    if (d1 >= kStationaryEps && d2 >= kStationaryEps) {
      const double a1 = std::atan2(pred_disp->second, pred_disp->first);
      const double a2 = std::atan2(link_disp.second, link_disp.first);
      c.c_turn = 0.5 * (1.0 - std::cos(angular_diff(a2, a1)));
    }
  }

  if (!cohort.empty() && d2 >= kStationaryEps) {
    const double theta = std::atan2(link_disp.second, link_disp.first);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& comp : cohort)
      best = std::min(best, 0.5 * (1.0 - std::cos(angular_diff(theta, comp.mu))));
    c.c_cohort = best;
  }

  c.total = w.w_eq * c.c_eq / w.var_eq + w.w_turn * c.c_turn / w.var_turn +
            w.w_cohort * c.c_cohort / w.var_cohort;
  return c;
}

std::vector<double> default_lambda_grid(std::span<const CostBreakdown> costs,
                                        int size) {
  if (size < 2) throw std::invalid_argument("default_lambda_grid: size must be >= 2");
  std::vector<double> totals;
  totals.reserve(costs.size());
  for (const auto& c : costs) totals.push_back(c.total);
  double median = 0.0;
  if (!totals.empty()) {
    std::sort(totals.begin(), totals.end());
    median = totals[totals.size() / 2];
  }
  // The grid spans from the bulk of plausible links (twice the median cost)
  // to full admission (just above the maximum cost). A top below the maximum
  // would keep the frontier from reaching the full-matching regime, so its
  // cost normalization would miss the expensive tail that separates plausible
  // links from implausible ones; a bottom far below the median wastes most of
  // the frontier resolution on near-empty solutions.
  double lo = 2.0 * median, hi = 10.0 * median;
  if (!totals.empty()) hi = std::max(hi, totals.back() * (1.0 + 1e-9) + 1e-12);
  if (median < 1e-12 && (totals.empty() || totals.back() < 1e-12)) {
    lo = 1e-4;  // all-zero costs: any positive reward admits every link
    hi = 1.0;
  } else if (lo < 1e-12) {
    lo = 1e-6 * hi;
  }
  std::vector<double> grid(size);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < size; ++i)
    grid[i] = std::exp(llo + (lhi - llo) * i / (size - 1));
  return grid;
}

ParetoResult pareto_select(int n_left, int n_right,
                           std::span<const CandidateLink> candidates,
                           std::span<const CostBreakdown> costs,
                           std::span<const double> lambda_grid) {
  if (lambda_grid.size() < 2)
    throw std::invalid_argument("pareto_select: lambda grid needs >= 2 values");
  for (size_t i = 1; i < lambda_grid.size(); ++i)
    if (!(lambda_grid[i] > lambda_grid[i - 1]))
      throw std::invalid_argument("pareto_select: lambda grid must be strictly increasing");
  if (candidates.size() != costs.size())
    throw std::invalid_argument("pareto_select: candidate/cost size mismatch");

  std::vector<AssignEdge> edges(candidates.size());
  for (size_t e = 0; e < candidates.size(); ++e)
    edges[e] = {candidates[e].from, candidates[e].to, costs[e].total};

  ParetoResult out;
  std::vector<AssignmentSolution> sols;
  sols.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    sols.push_back(solve_assignment(n_left, n_right, edges, lambda));
    const auto& s = sols.back();
    out.frontier.points.push_back({s.link_count(), s.total_cost, lambda});
  }

  int min_n = out.frontier.points[0].link_count, max_n = min_n;
  double min_c = out.frontier.points[0].total_cost, max_c = min_c;
  for (const auto& p : out.frontier.points) {
    min_n = std::min(min_n, p.link_count);
    max_n = std::max(max_n, p.link_count);
    min_c = std::min(min_c, p.total_cost);
    max_c = std::max(max_c, p.total_cost);
  }
  out.frontier.degenerate = (min_n == max_n) && (max_c - min_c < 1e-12);

  const double n_range = std::max(1, max_n - min_n);
  const double c_range = max_c - min_c;
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(out.frontier.points.size()); ++i) {
    const auto& p = out.frontier.points[i];
    const double nn = (p.link_count - min_n) / n_range;
    const double nc = c_range < 1e-12 ? 0.0 : (p.total_cost - min_c) / c_range;
    const double d2 = (1.0 - nn) * (1.0 - nn) + nc * nc;
    const bool better =
        d2 < best_d2 - 1e-15 ||
        (std::abs(d2 - best_d2) <= 1e-15 &&
         (p.link_count > out.frontier.points[best].link_count ||
          (p.link_count == out.frontier.points[best].link_count &&
           p.total_cost < out.frontier.points[best].total_cost)));
    if (better) {
      best_d2 = d2;
      best = i;
    }
  }
  out.frontier.chosen = best;
  out.solution = std::move(sols[best]);
  return out;
}

namespace {

double change_fraction(const std::vector<std::pair<int, int>>& prev,
                       const std::vector<std::pair<int, int>>& cur) {
  if (prev.empty() && cur.empty()) return 0.0;
  size_t inter = 0;
  size_t i = 0, j = 0;  // both sorted
  while (i < prev.size() && j < cur.size()) {
    if (prev[i] < cur[j]) ++i;
    else if (cur[j] < prev[i]) ++j;
    else { ++inter; ++i; ++j; }
  }
  const size_t uni = prev.size() + cur.size() - inter;
  return static_cast<double>(uni - inter) / static_cast<double>(uni);
}

}  // namespace

TrackResult track_sequence(const std::vector<std::vector<Detection>>& frames,
                           const TrackerConfig& cfg) {
  if (frames.size() < 3)
    throw std::invalid_argument("track_sequence: need at least 3 frames");

  TrackResult res;
  res.steps.resize(frames.size() - 1);

  const double max_disp = cfg.calib.max_disp_px();
  Weights weights;
  std::vector<VonMisesComponent> model;  // carried across frame steps

  // Selected links of the previous step, as to-index -> displacement.
  std::unordered_map<int, std::pair<double, double>> prev_by_to;

  for (size_t t = 0; t + 1 < frames.size(); ++t) {
    const auto cands =
        gen_candidates(frames[t], frames[t + 1], max_disp);

    // Predecessor displacement per candidate (the selected link into the
    // candidate's origin detection, when one exists).
    std::vector<std::optional<std::pair<double, double>>> preds(cands.size());
    for (size_t e = 0; e < cands.size(); ++e) {
      const auto it = prev_by_to.find(cands[e].from);
      if (it != prev_by_to.end()) preds[e] = it->second;
    }

    std::vector<std::pair<int, int>> selected;  // (from, to), sorted
    std::vector<CostBreakdown> costs(cands.size());
    AssignmentSolution chosen;
    bool converged = false;
    int iter = 0;

    for (iter = 1; iter <= cfg.max_iterations; ++iter) {
      for (size_t e = 0; e < cands.size(); ++e)
        costs[e] = link_cost(preds[e], {cands[e].dx, cands[e].dy}, model, weights);

      // Normalize costs against the spread of the whole candidate population:
      // the population includes the implausible links, so its variances give a
      // discriminative scale, whereas selected-link variances collapse toward
      // zero on clean data and blow the normalized costs up by orders of
      // magnitude. Selected-link variances still drive the weight update below.
      if (!cands.empty()) {
        double m[3] = {0, 0, 0}, v[3] = {0, 0, 0};
        const double n = static_cast<double>(cands.size());
        for (const auto& c : costs) {
          m[0] += c.c_eq;
          m[1] += c.c_turn;
          m[2] += c.c_cohort;
        }
        for (int k = 0; k < 3; ++k) m[k] /= n;
        for (const auto& c : costs) {
          v[0] += (c.c_eq - m[0]) * (c.c_eq - m[0]);
          v[1] += (c.c_turn - m[1]) * (c.c_turn - m[1]);
          v[2] += (c.c_cohort - m[2]) * (c.c_cohort - m[2]);
        }
        weights.var_eq = std::max(cfg.var_floor, v[0] / n);
        weights.var_turn = std::max(cfg.var_floor, v[1] / n);
        weights.var_cohort = std::max(cfg.var_floor, v[2] / n);
        for (auto& c : costs)
          c.total = weights.w_eq * c.c_eq / weights.var_eq +
                    weights.w_turn * c.c_turn / weights.var_turn +
                    weights.w_cohort * c.c_cohort / weights.var_cohort;
      }

      if (cands.empty()) {
        chosen = AssignmentSolution{};
        res.iterations.push_back({static_cast<int>(t), iter, 0, 0.0, 0.0});
        converged = true;
        break;
      }

      // Cold start: with no predecessors and no cohort model every candidate
      // costs zero, so any maximum matching is optimal and the solver would
      // pick an arbitrary one that later iterations slowly unwind. Break the
      // tie toward short displacements; the scale keeps each cost far below
      // any admission reward so link counts are unaffected.
      bool any_signal = false;
      for (const auto& c : costs)
        if (c.total != 0.0) {
          any_signal = true;
          break;
        }
      if (!any_signal) {
        double dmax = 1.0;
        for (const auto& cd : cands)
          dmax = std::max(dmax, cd.dx * cd.dx + cd.dy * cd.dy);
        for (size_t e = 0; e < cands.size(); ++e)
          costs[e].total = 1e-9 *
              (cands[e].dx * cands[e].dx + cands[e].dy * cands[e].dy) / dmax;
      }

      const auto grid = default_lambda_grid(costs, cfg.lambda_grid_size);
      auto pr = pareto_select(static_cast<int>(frames[t].size()),
                              static_cast<int>(frames[t + 1].size()), cands,
                              costs, grid);
      chosen = std::move(pr.solution);

      std::vector<std::pair<int, int>> cur;
      cur.reserve(chosen.selected.size());
      for (int e : chosen.selected) cur.emplace_back(cands[e].from, cands[e].to);

      const double frac = change_fraction(selected, cur);
      res.iterations.push_back({static_cast<int>(t), iter,
                                chosen.link_count(), chosen.total_cost, frac});
      selected = std::move(cur);

      if (frac < cfg.convergence_frac) {
        converged = true;
        break;
      }

      // Near-stability damping: once only a small minority of links still
      // changes, stop updating the model and weights. The next pass then
      // reproduces this selection exactly and the loop reaches a fixed
      // point, instead of orbiting between near-optimal mixture fits that
      // keep flipping borderline links.
      if (frac < cfg.freeze_frac) continue;

      // Refit the cohort model from the selected displacement angles.
      std::vector<double> angles;
      for (int e : chosen.selected) {
        const double sp = std::hypot(cands[e].dx, cands[e].dy);
        if (sp >= kStationaryEps)
          angles.push_back(std::atan2(cands[e].dy, cands[e].dx));
      }
      const int kfit = std::min<int>(cfg.k_max, static_cast<int>(angles.size()) / 2);
      if (kfit >= 1)
        model = vm_mixture_em(angles, kfit, cfg.w_min, cfg.seed).components;

      // Component variances over the selected links, then
      // inverse-variance weights.
      if (!chosen.selected.empty()) {
        double m[3] = {0, 0, 0}, v[3] = {0, 0, 0};
        const double n = static_cast<double>(chosen.selected.size());
        for (int e : chosen.selected) {
          m[0] += costs[e].c_eq;
          m[1] += costs[e].c_turn;
          m[2] += costs[e].c_cohort;
        }
        for (int k = 0; k < 3; ++k) m[k] /= n;
        for (int e : chosen.selected) {
          v[0] += (costs[e].c_eq - m[0]) * (costs[e].c_eq - m[0]);
          v[1] += (costs[e].c_turn - m[1]) * (costs[e].c_turn - m[1]);
          v[2] += (costs[e].c_cohort - m[2]) * (costs[e].c_cohort - m[2]);
        }
        const double se = std::max(cfg.var_floor, v[0] / n);
        const double st = std::max(cfg.var_floor, v[1] / n);
        const double sc = std::max(cfg.var_floor, v[2] / n);
        const double pe = 1.0 / (se + cfg.weight_epsilon);
        const double pt = 1.0 / (st + cfg.weight_epsilon);
        const double pc = 1.0 / (sc + cfg.weight_epsilon);
        const double z = pe + pt + pc;
        weights.w_eq = pe / z;
        weights.w_turn = pt / z;
        weights.w_cohort = pc / z;
      }

    }
    if (!converged) res.cap_hit_frames.push_back(static_cast<int>(t));

    // Emit vectors and stage predecessors for the next step.
    prev_by_to.clear();
    auto& step = res.steps[t];
    for (int e : chosen.selected) {
      const Detection& d = frames[t][cands[e].from];
      TrackedLink tl;
      tl.vec = {static_cast<int>(t), d.x, d.y, cands[e].dx, cands[e].dy};
      tl.cost = costs[e].total;
      step.push_back(tl);
      prev_by_to[cands[e].to] = {cands[e].dx, cands[e].dy};
    }
  }

  res.final_model = std::move(model);
  res.final_weights = weights;
  return res;
}

}  // namespace ifta
