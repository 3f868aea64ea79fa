// ifta: instantaneous flow tracking of crowd motion.
//
// Subcommands: simulate, track, evaluate, render, presets.
// Exit codes: 0 success, 1 usage/config error, 2 input data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ifta/config.hpp"
#include "ifta/eval.hpp"
#include "ifta/io.hpp"
#include "ifta/pipeline.hpp"
#include "ifta/render.hpp"
#include "ifta/sim.hpp"

namespace fs = std::filesystem;
using namespace ifta;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_run_config(const std::string& config_path,
                          const std::string& preset, long seed_override) {
  RunConfig cfg;
  if (!preset.empty()) {
    try {
      cfg.sim = preset_scenario(preset);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (!config_path.empty()) {
    try {
      apply_config_file(config_path, &cfg);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (seed_override >= 0) {
    cfg.seed = static_cast<uint64_t>(seed_override);
    cfg.sim.seed = cfg.seed;
  } else {
    cfg.sim.seed = cfg.seed;
  }
  return cfg;
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 long seed, const std::string& out_dir) {
  const RunConfig cfg = load_run_config(config_path, preset, seed);
  const SimResult sim = simulate(cfg.sim);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const auto tmp = [&](const char* n) { return (dir / n).string() + ".tmp"; };
  write_detection_rows(tmp("detections.csv"), sim.truth, true);
  write_detection_rows(tmp("trajectories.csv"), sim.trajectories, true);
  std::ofstream cfgf(tmp("config.txt"), std::ios::binary);
  cfgf << config_to_string(cfg);
  cfgf.close();
  for (const char* n : {"detections.csv", "trajectories.csv", "config.txt"})
    fs::rename((dir / n).string() + ".tmp", dir / n);

  std::cout << "simulated " << cfg.sim.n_frames << " frames, "
            << sim.truth.size() << " detections -> " << out_dir << "\n";
  return 0;
}

int cmd_track(const std::string& config_path, const std::string& preset,
              const std::string& input, long seed, const std::string& out_dir) {
  RunConfig cfg = load_run_config(config_path, preset, seed);
  if (!input.empty()) cfg.detections_path = input;
  const auto frames = load_input_frames(cfg);
  const PipelineOutput out = run_pipeline(frames, cfg);
  write_outputs(out, cfg, out_dir);
  std::cout << "tracked " << frames.size() << " frames: " << out.links.size()
            << " links, " << out.reports.size() << " cohort reports, "
            << out.alerts.size() << " alerts -> " << out_dir << "\n";
  if (!out.cap_hit_frames.empty()) {
    std::cout << "warning: reweighting hit the iteration cap at frame steps:";
    for (int f : out.cap_hit_frames) std::cout << " " << f;
    std::cout << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& links_path, const std::string& cohorts_path,
                 const std::string& truth_path, std::optional<int> onset,
                 const std::string& out_path) {
  const auto links = load_links(links_path);
  const auto reports =
      cohorts_path.empty() ? std::vector<CohortRow>{} : load_cohorts(cohorts_path);
  const auto truth = load_detection_rows(truth_path);
  const EvalReport rep = evaluate(links, reports, truth, onset);

  std::ostringstream os;
  os << "link_precision = " << fmt_double(rep.link_precision) << "\n"
     << "link_recall = " << fmt_double(rep.link_recall) << "\n"
     << "cohort_count_error = " << rep.cohort_count_error << "\n"
     << "mean_direction_error_deg = " << fmt_double(rep.mean_direction_error_deg)
     << "\n"
     << "onset_latency_frames = "
     << (rep.onset_detected ? std::to_string(rep.onset_latency_frames)
                            : std::string("not detected"))
     << "\n";
  std::cout << os.str();
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << os.str();
  }
  return 0;
}

int cmd_render(const std::string& links_path, const std::string& locations_path,
               const std::string& out_dir, const std::string& frame_range,
               double width, double height) {
  const auto links = load_links(links_path);
  std::vector<SensitiveLocation> locations;
  if (!locations_path.empty()) locations = load_locations(locations_path);

  int lo = 0, hi = -1;
  for (const auto& l : links) hi = std::max(hi, l.frame);
  if (!frame_range.empty()) {
    const size_t dots = frame_range.find("..");
    if (dots == std::string::npos)
      throw UsageError("--frames expects A..B");
    try {
      lo = std::stoi(frame_range.substr(0, dots));
      hi = std::stoi(frame_range.substr(dots + 2));
    } catch (const std::exception&) {
      throw UsageError("--frames expects integer bounds A..B");
    }
  }
  if (width <= 0.0 || height <= 0.0) {
    for (const auto& l : links) {
      width = std::max({width, l.from_x + 10.0, l.to_x + 10.0});
      height = std::max({height, l.from_y + 10.0, l.to_y + 10.0});
    }
    width = std::max(width, 100.0);
    height = std::max(height, 100.0);
  }

  fs::create_directories(out_dir);
  int written = 0;
  for (int f = lo; f <= hi; ++f) {
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%05d.svg", f);
    std::ofstream svg(fs::path(out_dir) / name, std::ios::binary);
    svg << render_frame_svg(links, f, width, height, locations);
    ++written;
  }
  std::cout << "rendered " << written << " frame(s) -> " << out_dir << "\n";
  return 0;
}

int cmd_presets() {
  for (const auto& name : preset_names()) {
    const ScenarioConfig cfg = preset_scenario(name);
    std::cout << name << ": arena " << cfg.arena_w << "x" << cfg.arena_h << ", "
              << cfg.n_frames << " frames, " << cfg.walker_count << " walkers, "
              << cfg.cohorts.size() << " cohort(s)";
    for (const auto& c : cfg.cohorts)
      std::cout << " [n=" << c.count << " dir=" << c.direction
                << " speed=" << c.speed << " kappa=" << c.heading_kappa
                << " onset=" << c.onset_frame << "]";
    std::cout << ", p_miss=" << cfg.p_miss << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ifta: organized-cohort detection in crowd motion"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir = "out", input;
  long seed = -1;

  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic scenario");
  sim_cmd->add_option("--config", config_path, "config file");
  sim_cmd->add_option("--preset", preset, "scenario preset name");
  sim_cmd->add_option("--seed", seed, "seed override");
  sim_cmd->add_option("--out", out_dir, "output directory");

  auto* track_cmd = app.add_subcommand("track", "run the tracking pipeline");
  track_cmd->add_option("--config", config_path, "config file");
  track_cmd->add_option("--preset", preset, "preset (for defaults echo only)");
  track_cmd->add_option("--in", input, "detections CSV (overrides io.detections)");
  track_cmd->add_option("--seed", seed, "seed override");
  track_cmd->add_option("--out", out_dir, "output directory");

  std::string links_path, cohorts_path, truth_path, eval_out;
  int onset = -1;
  auto* eval_cmd = app.add_subcommand("evaluate", "score links against ground truth");
  eval_cmd->add_option("--links", links_path, "links CSV")->required();
  eval_cmd->add_option("--cohorts", cohorts_path, "cohort reports CSV");
  eval_cmd->add_option("--truth", truth_path, "ground-truth detections CSV")->required();
  eval_cmd->add_option("--onset", onset, "true onset frame (for latency)");
  eval_cmd->add_option("--out", eval_out, "also write the report here");

  std::string locations_path, frame_range;
  double width = 0.0, height = 0.0;
  auto* render_cmd = app.add_subcommand("render", "render flow fields to SVG");
  render_cmd->add_option("--links", links_path, "links CSV")->required();
  render_cmd->add_option("--locations", locations_path, "sensitive locations CSV");
  render_cmd->add_option("--frames", frame_range, "frame range A..B");
  render_cmd->add_option("--width", width, "arena width (auto if omitted)");
  render_cmd->add_option("--height", height, "arena height (auto if omitted)");
  render_cmd->add_option("--out", out_dir, "output directory");

  app.add_subcommand("presets", "list scenario presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(config_path, preset, seed, out_dir);
    if (track_cmd->parsed()) return cmd_track(config_path, preset, input, seed, out_dir);
    if (eval_cmd->parsed())
      return cmd_evaluate(links_path, cohorts_path, truth_path,
                          onset >= 0 ? std::optional<int>(onset) : std::nullopt,
                          eval_out);
    if (render_cmd->parsed())
      return cmd_render(links_path, locations_path, out_dir, frame_range, width,
                        height);
    return cmd_presets();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
