#include "ifta/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ifta/cohort.hpp"
#include "ifta/detect.hpp"
#include "ifta/mrf.hpp"

namespace fs = std::filesystem;

namespace ifta {

namespace {

// Stable cohort identity across frames: components are matched to known
// cohorts by mean-direction proximity, new directions get fresh ids.
class CohortRegistry {
 public:
  std::vector<int> assign(std::span<const VonMisesComponent> comps) {
    std::vector<int> ids(comps.size(), -1);
    std::vector<char> taken(entries_.size(), 0);
    for (size_t c = 0; c < comps.size(); ++c) {
      int best = -1;
      double best_e = 30.0 * kPi / 180.0;
      for (size_t r = 0; r < entries_.size(); ++r) {
        if (taken[r]) continue;
        const double e = std::abs(angular_diff(comps[c].mu, entries_[r].mu));
        if (e <= best_e) {
          best_e = e;
          best = static_cast<int>(r);
        }
      }
      if (best >= 0) {
        taken[best] = 1;
        entries_[best].mu = comps[c].mu;
        ids[c] = entries_[best].id;
      } else {
        entries_.push_back({next_id_, comps[c].mu});
        taken.push_back(1);
        ids[c] = next_id_++;
      }
    }
    return ids;
  }

 private:
  struct Entry {
    int id;
    double mu;
  };
  std::vector<Entry> entries_;
  int next_id_ = 0;
};

}  // namespace

PipelineOutput run_pipeline(const std::vector<std::vector<Detection>>& frames,
                            const RunConfig& cfg) {
  PipelineOutput out;

  // Arena extent from the data (density map, pooling gate, rendering).
  for (const auto& fr : frames)
    for (const auto& d : fr) {
      out.arena_w = std::max(out.arena_w, d.x + 1.0);
      out.arena_h = std::max(out.arena_h, d.y + 1.0);
    }

  std::vector<Detection> all_detections;
  for (const auto& fr : frames)
    all_detections.insert(all_detections.end(), fr.begin(), fr.end());
  out.density = density_map(all_detections, cfg.density_cell_px,
                            std::max(out.arena_w, 1.0), std::max(out.arena_h, 1.0));

  if (frames.size() < 3) return out;  // nothing to link

  const TrackResult tr = track_sequence(frames, cfg.tracker_config());
  out.iterations = tr.iterations;
  out.cap_hit_frames = tr.cap_hit_frames;

  CohortRegistry registry;
  AlertDeduper dedup(cfg.alert);
  std::vector<SensitiveLocation> locations;
  if (!cfg.locations_path.empty()) locations = load_locations(cfg.locations_path);

  for (size_t t = 0; t < tr.steps.size(); ++t) {
    const auto& newest = tr.steps[t];

    // Pool recent triplet outputs when the scene is sparse.
    std::vector<std::vector<FlowVector>> sets;
    if (should_aggregate(newest.size(), out.arena_w, out.arena_h,
                         cfg.pool_threshold)) {
      const size_t first = t >= 4 ? t - 4 : 0;
      for (size_t s = first; s <= t; ++s) {
        sets.emplace_back();
        for (const auto& tl : tr.steps[s]) sets.back().push_back(tl.vec);
      }
    } else {
      sets.emplace_back();
      for (const auto& tl : newest) sets.back().push_back(tl.vec);
    }
    const auto pooled = sliding_window_aggregate(sets);

    // Cluster over moving pooled vectors.
    std::vector<FlowVector> moving;
    std::vector<double> angles;
    for (const auto& pv : pooled) {
      if (pv.vec.speed() < kStationaryEps) continue;
      moving.push_back(pv.vec);
      angles.push_back(pv.vec.angle());
    }

    // Fit the mixture on the faster vectors only: organized cohorts move at
    // full stride while the unorganized background mills around slowly, so
    // the upper speed range carries most of the direction signal. Capping
    // the threshold at the median speed keeps the fit population
    // representative when speeds are homogeneous. Every moving vector is
    // still labeled against the fitted components afterwards.
    std::vector<double> fit_angles;
    if (!moving.empty()) {
      std::vector<double> speeds;
      speeds.reserve(moving.size());
      for (const auto& mv : moving) speeds.push_back(mv.speed());
      std::sort(speeds.begin(), speeds.end());
      const size_t m = speeds.size();
      const double q90 = speeds[(9 * (m - 1)) / 10];
      const double thr = 0.8 * q90;
      for (size_t i = 0; i < moving.size(); ++i)
        if (moving[i].speed() >= thr) fit_angles.push_back(angles[i]);
      // Degenerate speed distributions can leave too little to fit on.
      if (fit_angles.size() < std::max<size_t>(20, m / 10) &&
          fit_angles.size() < m)
        fit_angles = angles;
    }

    std::vector<int> newest_labels(newest.size(), -1);
    CohortModel model;
    std::vector<int> ids;
    if (fit_angles.size() >= 2) {
      const int kfit =
          std::min<int>(cfg.k_max, static_cast<int>(fit_angles.size()) / 2);
      const MixtureFit mix = vm_mixture_em(fit_angles, kfit, cfg.w_min, cfg.seed);

      std::vector<int> labels;
      if (cfg.beta > 0.0 && moving.size() >= 2) {
        const double med = median_nn_distance(moving);
        const double radius = cfg.radius_scale * std::max(med, 1e-9);
        const auto graph = build_neighbor_graph(moving, cfg.k_nn, radius);
        labels = mrf_relabel(angles, mix.components, graph, cfg.beta).labels;
      } else {
        labels.resize(angles.size());
        for (size_t i = 0; i < angles.size(); ++i)
          labels[i] = vm_best_component(angles[i], mix.components);
      }

      // Reports and link labels cover the newest set only; pooled older
      // vectors support the fit but are not re-counted.
      std::vector<FlowVector> newest_moving;
      std::vector<int> newest_moving_labels;
      size_t mi = 0;
      std::vector<int> moving_label_of_newest(newest.size(), -1);
      {
        // Walk pooled again to align labels with newest members.
        size_t idx = 0;
        const int newest_tag = static_cast<int>(sets.size()) - 1;
        for (const auto& pv : pooled) {
          if (pv.vec.speed() < kStationaryEps) {
            ++idx;
            continue;
          }
          if (pv.source_triplet == newest_tag) {
            newest_moving.push_back(pv.vec);
            newest_moving_labels.push_back(labels[mi]);
          }
          ++mi;
          ++idx;
        }
      }

      model = build_cohort_model(newest_moving, mix.components,
                                 newest_moving_labels, cfg.density_floor);
      ids = registry.assign(mix.components);

      // Map labels back onto the newest TrackedLink order.
      size_t nm = 0;
      for (size_t i = 0; i < newest.size(); ++i) {
        if (newest[i].vec.speed() < kStationaryEps) continue;
        newest_labels[i] = model.labels[nm] >= 0 ? ids[model.labels[nm]] : -1;
        ++nm;
      }

      const auto reports =
          cohort_report(model, newest_moving, cfg.calib,
                        static_cast<int>(t) + 1, ids, cfg.alert);
      for (const auto& rep : reports) {
        out.reports.push_back(rep);
        for (const auto& ev :
             check_alerts(rep, locations, cfg.calib, cfg.alert.angle_tol_deg))
          if (dedup.admit(ev)) out.alerts.push_back(ev);
      }
    }

    for (size_t i = 0; i < newest.size(); ++i) {
      const auto& tl = newest[i];
      LinkRow row;
      row.frame = tl.vec.frame;
      row.from_x = tl.vec.x;
      row.from_y = tl.vec.y;
      row.to_x = tl.vec.x + tl.vec.dx;
      row.to_y = tl.vec.y + tl.vec.dy;
      row.cohort_id = newest_labels[i];
      row.cost = tl.cost;
      out.links.push_back(row);
    }
  }
  return out;
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw std::runtime_error("cannot write file: " + path);
  outf << content;
}

}  // namespace

void write_outputs(const PipelineOutput& out, const RunConfig& cfg,
                   const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  struct Planned {
    fs::path tmp, final_path;
  };
  std::vector<Planned> planned;
  auto stage = [&](const std::string& name) {
    const fs::path f = dir / name;
    const fs::path tmp = dir / (name + ".tmp");
    planned.push_back({tmp, f});
    return tmp.string();
  };

  try {
    write_links(stage("links.csv"), out.links);
    write_cohorts(stage("cohorts.csv"), out.reports);
    write_iters(stage("iterations.csv"), out.iterations);

    std::string alerts;
    for (const auto& ev : out.alerts) alerts += alert_to_json(ev) + "\n";
    write_text_file(stage("alerts.jsonl"), alerts);

    std::string density = "cell_x,cell_y,count\n";
    for (int cy = 0; cy < out.density.ny; ++cy)
      for (int cx = 0; cx < out.density.nx; ++cx)
        density += std::to_string(cx) + "," + std::to_string(cy) + "," +
                   std::to_string(out.density.counts[static_cast<size_t>(cy) *
                                                         out.density.nx + cx]) + "\n";
    write_text_file(stage("density.csv"), density);

    write_text_file(stage("config.txt"), config_to_string(cfg));
  } catch (...) {
    for (const auto& p : planned) fs::remove(p.tmp);
    throw;
  }
  for (const auto& p : planned) fs::rename(p.tmp, p.final_path);
}

std::vector<std::vector<Detection>> load_input_frames(const RunConfig& cfg) {
  if (!cfg.detections_path.empty()) return load_detections(cfg.detections_path);
  if (cfg.frames_dir.empty())
    throw std::runtime_error("no input: set io.detections or io.frames_dir");

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.frames_dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("no .pgm frames found in " + cfg.frames_dir);

  std::vector<std::vector<Detection>> frames;
  for (size_t f = 0; f < files.size(); ++f) {
    const ImageGrid img = read_pgm(files[f].string());
    const ImageGrid filtered = dog_filter(img, cfg.detector);
    frames.push_back(detect_features(filtered, cfg.detector, static_cast<int>(f)));
  }
  return frames;
}

}  // namespace ifta
