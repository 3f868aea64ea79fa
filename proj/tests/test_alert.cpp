#include <doctest.h>

#include <vector>

#include "ifta/alert.hpp"

using namespace ifta;

namespace {

CohortRow report_towards(double x, double y, double dir, double speed_px,
                         int count = 10) {
  CohortRow r;
  r.frame = 5;
  r.cohort_id = 1;
  r.count = count;
  r.centroid_x = x;
  r.centroid_y = y;
  r.mean_dir_rad = dir;
  r.mean_speed_px = speed_px;
  r.kappa = 10.0;
  r.weight = 1.0;
  return r;
}

}  // namespace

TEST_CASE("ETA formula: 600 px at 3 px/frame, 0.05 m/px, 20 fps") {
  // Distance 600 px = 30 m; speed = 3 px/frame = 0.15 m/frame = 3 m/s.
  CalibrationConfig calib;  // 0.05 m/px, 20 fps
  const std::vector<SensitiveLocation> locs = {{"gate", 700.0, 100.0, 0.0}};
  const auto report = report_towards(100.0, 100.0, 0.0, 3.0);
  const auto alerts = check_alerts(report, locs, calib, 20.0);
  REQUIRE(alerts.size() == 1);
  CHECK(alerts[0].eta_seconds == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(alerts[0].location_id == "gate");
  CHECK(alerts[0].approach_angle_deg == doctest::Approx(0.0));
  CHECK(alerts[0].count == 10);
}

TEST_CASE("arrival-zone radius shortens the ETA") {
  CalibrationConfig calib;
  const std::vector<SensitiveLocation> locs = {{"gate", 700.0, 100.0, 100.0}};
  const auto alerts = check_alerts(report_towards(100.0, 100.0, 0.0, 3.0), locs,
                                   calib, 20.0);
  REQUIRE(alerts.size() == 1);
  // 500 px remaining = 25 m at 3 m/s.
  CHECK(alerts[0].eta_seconds == doctest::Approx(25.0 / 3.0));
}

TEST_CASE("angle tolerance is boundary-inclusive") {
  CalibrationConfig calib;
  const std::vector<SensitiveLocation> locs = {{"gate", 700.0, 100.0, 0.0}};
  const double tol = 20.0;
  auto on_edge = report_towards(100.0, 100.0, tol * kPi / 180.0, 3.0);
  CHECK(check_alerts(on_edge, locs, calib, tol).size() == 1);
  auto outside = report_towards(100.0, 100.0, (tol + 0.5) * kPi / 180.0, 3.0);
  CHECK(check_alerts(outside, locs, calib, tol).empty());
}

TEST_CASE("cohorts moving away or standing still never alert") {
  CalibrationConfig calib;
  const std::vector<SensitiveLocation> locs = {{"gate", 700.0, 100.0, 0.0}};
  CHECK(check_alerts(report_towards(100.0, 100.0, kPi, 3.0), locs, calib, 20.0)
            .empty());
  CHECK(check_alerts(report_towards(100.0, 100.0, 0.0, 0.0), locs, calib, 20.0)
            .empty());
}

TEST_CASE("deduper holds repeats until ETA or age justifies a re-alert") {
  AlertConfig cfg;  // 20% ETA change or 20 frames
  AlertDeduper dd(cfg);
  AlertEvent ev;
  ev.frame_issued = 10;
  ev.cohort_id = 3;
  ev.location_id = "gate";
  ev.eta_seconds = 10.0;
  CHECK(dd.admit(ev));
  ev.frame_issued = 12;
  ev.eta_seconds = 9.5;  // 5% change, too soon
  CHECK_FALSE(dd.admit(ev));
  ev.frame_issued = 14;
  ev.eta_seconds = 7.0;  // 30% change
  CHECK(dd.admit(ev));
  ev.frame_issued = 20;
  ev.eta_seconds = 7.1;
  CHECK_FALSE(dd.admit(ev));
  ev.frame_issued = 35;  // 21 frames after the last admitted alert
  CHECK(dd.admit(ev));
  // Independent (cohort, location) pairs do not interfere.
  AlertEvent other = ev;
  other.cohort_id = 4;
  CHECK(dd.admit(other));
}

TEST_CASE("alert JSON uses snake_case fields") {
  AlertEvent ev;
  ev.frame_issued = 7;
  ev.cohort_id = 2;
  ev.location_id = "north_gate";
  ev.eta_seconds = 12.5;
  ev.count = 18;
  ev.approach_angle_deg = 4.25;
  const auto js = alert_to_json(ev);
  CHECK(js.find("\"frame_issued\":7") != std::string::npos);
  CHECK(js.find("\"cohort_id\":2") != std::string::npos);
  CHECK(js.find("\"location_id\":\"north_gate\"") != std::string::npos);
  CHECK(js.find("\"eta_seconds\":12.500000") != std::string::npos);
  CHECK(js.find("\"count\":18") != std::string::npos);
  CHECK(js.find("\"approach_angle_deg\":4.250000") != std::string::npos);
  CHECK(js.find('\n') == std::string::npos);  // one line per event
}

TEST_CASE("cohort_report gates on member count and coherence") {
  AlertConfig cfg;  // min_members 5, r_min 0.7
  CalibrationConfig calib;
  std::vector<FlowVector> v;
  for (int i = 0; i < 6; ++i) v.push_back({0, double(5 * i), 0.0, 2.0, 0.0});
  CohortModel model;
  model.components = {{0.0, 9.0, 1.0}};
  model.labels = std::vector<int>(6, 0);
  const auto full = build_cohort_model(v, model.components, model.labels, 1e-9);
  const std::vector<int> ids = {7};
  auto rows = cohort_report(full, v, calib, 11, ids, cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].cohort_id == 7);
  CHECK(rows[0].frame == 11);
  CHECK(rows[0].count == 6);
  CHECK(rows[0].mean_speed_px == doctest::Approx(2.0));

  // Too few members: nothing reported.
  std::vector<FlowVector> few(v.begin(), v.begin() + 4);
  CohortModel small = build_cohort_model(few, model.components,
                                         std::vector<int>(4, 0), 1e-9);
  CHECK(cohort_report(small, few, calib, 11, ids, cfg).empty());

  // Incoherent members (low resultant length): nothing reported.
  std::vector<FlowVector> mixed;
  for (int i = 0; i < 3; ++i) mixed.push_back({0, double(5 * i), 0.0, 2.0, 0.0});
  for (int i = 3; i < 6; ++i) mixed.push_back({0, double(5 * i), 0.0, -2.0, 0.1});
  CohortModel loose = build_cohort_model(mixed, model.components,
                                         std::vector<int>(6, 0), 1e-12);
  CHECK(cohort_report(loose, mixed, calib, 11, ids, cfg).empty());
}

TEST_CASE("density map counts half-open cells and drops outsiders") {
  std::vector<Detection> dets = {
      {0, 0.0, 0.0, 1.0},     {0, 99.9, 99.9, 1.0},  {0, 100.0, 0.0, 1.0},
      {0, 150.0, 250.0, 1.0}, {0, -1.0, 10.0, 1.0},  {0, 10.0, 300.0, 1.0}};
  const auto dm = density_map(dets, 100.0, 300.0, 300.0);
  CHECK(dm.nx == 3);
  CHECK(dm.ny == 3);
  CHECK(dm.total == 4);
  CHECK(dm.counts[0] == 2);                  // cell (0,0)
  CHECK(dm.counts[1] == 1);                  // cell (1,0)
  CHECK(dm.counts[2 * 3 + 1] == 1);          // cell (1,2)
}
