#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mfc/csv.hpp"
#include "mfc/errors.hpp"
#include "mfc/metrics.hpp"
#include "mfc/presets.hpp"

using namespace mfc;

namespace {

// Single-loop series with e(t) supplied by the caller and y_ref = 0.
template <class F>
TimeSeries series(std::size_t n, double period, F error) {
  TimeSeries ts;
  ts.loops.resize(1);
  auto& L = ts.loops[0];
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * period;
    ts.t.push_back(t);
    L.y_ref.push_back(0.0);
    L.y_true.push_back(error(t));
    L.y_meas.push_back(error(t));
    L.u.push_back(1.0);
    L.e.push_back(error(t));
    L.f_est.push_back(0.0);
    L.ref_moving.push_back(0.0);
  }
  return ts;
}

}  // namespace

TEST(Metrics, ZeroErrorGivesZero) {
  const auto m = compute_metrics(series(101, 0.1, [](double) { return 0.0; }));
  EXPECT_EQ(m.loops[0].rmse_tail, 0.0);
  EXPECT_EQ(m.loops[0].max_abs_e, 0.0);
  EXPECT_NEAR(m.loops[0].control_energy, 101 * 0.1, 1e-12);
  EXPECT_EQ(m.rows, 101u);
}

TEST(Metrics, ConstantError) {
  const auto m = compute_metrics(series(50, 0.01, [](double) { return -0.1; }));
  EXPECT_NEAR(m.loops[0].rmse_tail, 0.1, 1e-15);
  EXPECT_NEAR(m.loops[0].max_abs_e, 0.1, 1e-15);
}

TEST(Metrics, SineRms) {
  // Rows 2000..9999 form the tail: eight whole periods of sin(2 pi t)
  // sampled 1000 times each, where the discrete mean of sin^2 is exactly 1/2.
  const auto m = compute_metrics(series(10000, 0.001, [](double t) { return std::sin(2 * std::numbers::pi * t); }));
  EXPECT_NEAR(m.loops[0].rmse_tail, 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Metrics, TailIgnoresEarlyTransient) {
  const auto m = compute_metrics(series(101, 0.1, [](double t) { return t < 1.0 ? 5.0 : 0.0; }));
  EXPECT_EQ(m.loops[0].rmse_tail, 0.0);
  EXPECT_EQ(m.loops[0].max_abs_e, 5.0);
}

TEST(Metrics, CrossCouplingCountsOnlyHoldingLoop) {
  TimeSeries ts = series(4, 1.0, [](double t) { return 0.1 * t; });
  ts.loops.push_back(ts.loops[0]);
  ts.loops[1].ref_moving = {1.0, 1.0, 0.0, 0.0};
  ts.loops[0].ref_moving = {0.0, 0.0, 0.0, 1.0};
  const auto m = compute_metrics(ts);
  EXPECT_NEAR(m.loops[0].cross_coupling, 0.1, 1e-15);
  EXPECT_NEAR(m.loops[1].cross_coupling, 0.3, 1e-15);
}

TEST(Metrics, EmptySeriesThrows) {
  EXPECT_THROW(compute_metrics(TimeSeries{}), ConfigError);
}

TEST(Metrics, JsonShape) {
  const auto j = nlohmann::json::parse(metrics_to_json(compute_metrics(series(10, 0.1, [](double) { return 0.0; }))));
  EXPECT_EQ(j["rows"], 10);
  EXPECT_EQ(j["diverged"], false);
  EXPECT_TRUE(j["loops"][0].contains("rmse_tail"));
}

TEST(Csv, ThreeRowsGiveFourLines) {
  const std::string s = csv_string(series(3, 0.5, [](double t) { return t; }));
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
  EXPECT_EQ(s.find('\r'), std::string::npos);
  EXPECT_EQ(s.substr(0, s.find('\n')), "t,y_ref,y_true,y_meas,u,e,f_est,ref_moving");
}

TEST(Csv, RoundTripIsExact) {
  Scenario sc = preset("case2");
  sc.horizon = 11.0;
  const TimeSeries a = run_scenario(sc);
  const TimeSeries b = parse_csv(csv_string(a));
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.loops[0].y_meas, b.loops[0].y_meas);
  EXPECT_EQ(a.loops[0].u, b.loops[0].u);
  EXPECT_EQ(a.loops[0].f_est, b.loops[0].f_est);
  EXPECT_EQ(csv_string(b), csv_string(a));
}

TEST(Csv, MimoColumnsAreSuffixed) {
  Scenario sc = preset("three_tank");
  sc.horizon = 2100.0;
  const TimeSeries ts = run_scenario(sc);
  const auto cols = csv_columns(ts);
  EXPECT_EQ(cols.front(), "t");
  EXPECT_EQ(cols[1], "y_ref_1");
  EXPECT_EQ(cols[8], "y_ref_2");
  EXPECT_EQ(cols.back(), "x3");
  const TimeSeries back = parse_csv(csv_string(ts));
  ASSERT_EQ(back.loops.size(), 2u);
  EXPECT_EQ(back.extras[0], ts.extras[0]);
}

TEST(Csv, FileErrorsNameThePath) {
  const auto ts = series(3, 0.5, [](double) { return 0.0; });
  try {
    emit_csv(ts, "/nonexistent-dir/out.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
  }
  EXPECT_THROW(read_csv("/nonexistent-dir/in.csv"), IoError);
  EXPECT_THROW(parse_csv(""), IoError);
  EXPECT_THROW(parse_csv("x,y\n1,2\n"), IoError);
}

TEST(Csv, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "mfc_csv_roundtrip.csv";
  const auto ts = series(20, 0.1, [](double t) { return std::cos(t) / 3.0; });
  emit_csv(ts, path);
  const auto back = read_csv(path);
  EXPECT_EQ(back.loops[0].e, ts.loops[0].e);
  std::filesystem::remove(path);
}
