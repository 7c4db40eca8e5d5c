#include <doctest.h>

#include <cmath>
#include <fstream>

#include "airgrid/errors.hpp"
#include "airgrid/eval.hpp"
#include "airgrid/rng.hpp"

using namespace airgrid;

TEST_CASE("r_squared: perfect, mean, anti-correlated, guards") {
  const std::vector<double> actual = {1.0, 2.0, 3.0};
  CHECK(*r_squared(actual, actual) == doctest::Approx(1.0));

  const std::vector<double> mean_pred = {2.0, 2.0, 2.0};
  CHECK(*r_squared(mean_pred, actual) == doctest::Approx(0.0));

  // SS oracle: residuals (1-3, 2-2, 3-1) => 8; total about mean 2 => 2
  const std::vector<double> reversed = {3.0, 2.0, 1.0};
  CHECK(*r_squared(actual, reversed) == doctest::Approx(-3.0).epsilon(1e-12));

  const std::vector<double> flat = {5.0, 5.0, 5.0};
  CHECK_FALSE(r_squared(actual, flat).has_value());
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(r_squared(one, one), ValidationError);
}

TEST_CASE("r_squared degrades monotonically with added misfit noise") {
  Rng rng(31);
  std::vector<double> actual(300);
  for (double& v : actual) v = rng.uniform(0, 50);
  double prev = 1.0;
  for (double sigma : {0.0, 1.0, 4.0, 16.0}) {
    Rng noise(7);  // same noise stream scaled up
    std::vector<double> pred = actual;
    for (double& v : pred) v += sigma * noise.normal(0, 1);
    const double r2 = *r_squared(pred, actual);
    CHECK(r2 <= prev + 1e-12);
    prev = r2;
  }
}

namespace {

std::vector<UtcHour> hourly_span(UtcHour start, size_t n) {
  std::vector<UtcHour> out;
  for (size_t i = 0; i < n; ++i) out.push_back(start + static_cast<int64_t>(i));
  return out;
}

}  // namespace

TEST_CASE("peak distance: exact match, half prediction, earliest tie") {
  const auto ts = hourly_span(make_hour(2014, 12, 3, 0), 5);
  const std::vector<double> measured = {10.0, 100.0, 30.0, 100.0, 5.0};
  const std::vector<double> exact = {0.0, 100.0, 0.0, 0.0, 0.0};
  const PeakReport hit = peak_distance("st", "NO2", ts, measured, exact);
  CHECK(hit.peak_distance_pct == 0.0);
  CHECK(hit.measured_peak == 100.0);
  CHECK(hit.peak_timestamp == ts[1]);  // earliest of the tied peaks

  const std::vector<double> half = {0.0, 50.0, 0.0, 0.0, 0.0};
  const PeakReport under = peak_distance("st", "NO2", ts, measured, half);
  CHECK(under.peak_distance_pct == doctest::Approx(50.0).epsilon(1e-12));

  // Eq. 1 antisymmetry: overprediction of the same magnitude flips the sign
  const std::vector<double> over = {0.0, 150.0, 0.0, 0.0, 0.0};
  const PeakReport above = peak_distance("st", "NO2", ts, measured, over);
  CHECK(above.peak_distance_pct == doctest::Approx(-50.0).epsilon(1e-12));
}

TEST_CASE("peak distance: inverted fixture reproduces the documented spread") {
  // peak 80.2 with a 42.5% distance implies a prediction of 80.2 * 0.575
  const auto ts = hourly_span(make_hour(2014, 12, 3, 8), 1);
  const std::vector<double> measured = {80.2};
  const double implied_prediction = 80.2 * (1.0 - 0.425);
  const std::vector<double> predicted = {implied_prediction};
  const PeakReport r = peak_distance("leo", "NO2", ts, measured, predicted);
  CHECK(implied_prediction == doctest::Approx(46.115).epsilon(1e-12));
  CHECK(r.peak_distance_pct == doctest::Approx(42.5).epsilon(1e-12));
  // stored fields recompute the percentage exactly
  CHECK((r.measured_peak - r.model_prediction_at_peak) / r.measured_peak * 100.0 ==
        doctest::Approx(r.peak_distance_pct).epsilon(1e-15));
}

TEST_CASE("mean peak distance: single, signed cancellation, five-station oracle") {
  PeakReport a;
  a.peak_distance_pct = 10.0;
  CHECK(mean_peak_distance({a}) == 10.0);

  PeakReport plus, minus;
  plus.peak_distance_pct = 20.0;
  minus.peak_distance_pct = -20.0;
  CHECK(mean_peak_distance({plus, minus}) == 0.0);

  std::vector<PeakReport> five;
  const double values[] = {3.5, -8.0, 42.5, 17.0, 0.5};
  double sum = 0.0;
  for (double v : values) {
    PeakReport r;
    r.peak_distance_pct = v;
    five.push_back(r);
    sum += v;
  }
  CHECK(mean_peak_distance(five) == doctest::Approx(sum / 5.0).epsilon(1e-12));
  CHECK_THROWS_AS(mean_peak_distance({}), ValidationError);
}

TEST_CASE("exceedance counting uses a strict threshold and is monotone") {
  const std::vector<double> values = {9.0, 11.0, 26.0, 41.0, 300.0};
  CHECK(exceedance_count(values, 25.0) == 3);
  CHECK(exceedance_count(values, 200.0) == 1);
  CHECK(exceedance_count(values, 9.0) == 4);  // strictly greater

  int64_t prev = 5;
  for (double level : {0.0, 10.0, 25.0, 40.0, 200.0, 400.0}) {
    const int64_t n = exceedance_count(values, level);
    CHECK(n <= prev);
    prev = n;
  }

  // an all-11 synthetic year against threshold 10 exceeds every hour
  const std::vector<double> year(8760, 11.0);
  CHECK(exceedance_count(year, 10.0) == 8760);
}

TEST_CASE("24h running mean: constants, step fixture, bounds, shift") {
  const std::vector<double> constant(50, 3.25);
  const auto cm = running_mean_24h(constant);
  for (size_t i = 0; i < 23; ++i) CHECK(std::isnan(cm[i]));
  for (size_t i = 23; i < cm.size(); ++i) CHECK(cm[i] == doctest::Approx(3.25));

  std::vector<double> step(48, 0.0);
  for (size_t i = 0; i < 24; ++i) step[i] = 1.0;
  const auto sm = running_mean_24h(step);
  CHECK(sm[23] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sm[35] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sm[47] == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(5);
  std::vector<double> series(200);
  for (double& v : series) v = rng.uniform(0, 100);
  const auto rm = running_mean_24h(series);
  for (size_t i = 23; i < series.size(); ++i) {
    double lo = 1e300, hi = -1e300;
    for (size_t j = i - 23; j <= i; ++j) {
      lo = std::min(lo, series[j]);
      hi = std::max(hi, series[j]);
    }
    CHECK(rm[i] >= lo - 1e-9);
    CHECK(rm[i] <= hi + 1e-9);
  }

  // adding a constant shifts the mean by the constant
  std::vector<double> shifted = series;
  for (double& v : shifted) v += 7.5;
  const auto rs = running_mean_24h(shifted);
  for (size_t i = 23; i < series.size(); ++i)
    CHECK(rs[i] == doctest::Approx(rm[i] + 7.5).epsilon(1e-12));

  // a missing hour poisons exactly the windows containing it
  std::vector<double> holed = series;
  holed[100] = std::numeric_limits<double>::quiet_NaN();
  const auto rh = running_mean_24h(holed);
  for (size_t i = 100; i < 124; ++i) CHECK(std::isnan(rh[i]));
  CHECK_FALSE(std::isnan(rh[124]));
  CHECK_FALSE(std::isnan(rh[99]));
}

TEST_CASE("exceedance share counts cells with any exceedance") {
  ExceedanceMap all;
  all.cells = {0, 1, 2};
  all.counts = {5, 1, 8760};
  CHECK(exceedance_share(all) == 1.0);

  ExceedanceMap none;
  none.cells = {0, 1};
  none.counts = {0, 0};
  CHECK(exceedance_share(none) == 0.0);

  ExceedanceMap some;
  some.cells = {0, 1, 2, 3};
  some.counts = {0, 2, 0, 1};
  CHECK(exceedance_share(some) == doctest::Approx(0.5));
  CHECK_THROWS_AS(exceedance_share(ExceedanceMap{}), ValidationError);
}

TEST_CASE("exceedance share ladder on a tuned synthetic fixture") {
  // 1000 cells shaped so the shares step down across the threshold ladder
  Rng rng(77);
  ExceedanceMap m10, m25, m40, m200;
  std::vector<std::vector<double>> cell_series;
  for (int c = 0; c < 1000; ++c) {
    std::vector<double> hours(240);
    const double base = rng.uniform(5.0, 45.0);
    for (double& v : hours) v = std::max(0.0, base + rng.normal(0, 8.0));
    if (c == 0) hours[0] = 250.0;  // a single extreme cell
    cell_series.push_back(std::move(hours));
  }
  auto build = [&](double level) {
    ExceedanceMap m;
    m.threshold = level;
    for (int c = 0; c < 1000; ++c) {
      m.cells.push_back(c);
      m.counts.push_back(exceedance_count(cell_series[static_cast<size_t>(c)], level));
    }
    return m;
  };
  const double s10 = exceedance_share(build(10.0));
  const double s25 = exceedance_share(build(25.0));
  const double s40 = exceedance_share(build(40.0));
  const double s200 = exceedance_share(build(200.0));

  // brute-force oracle for one level
  int hit = 0;
  for (const auto& hours : cell_series) {
    bool any = false;
    for (double v : hours) any = any || v > 25.0;
    hit += any ? 1 : 0;
  }
  CHECK(s25 == doctest::Approx(hit / 1000.0).epsilon(1e-12));

  CHECK(s10 >= s25);
  CHECK(s25 >= s40);
  CHECK(s40 >= s200);
  CHECK(s10 > 0.95);
  CHECK(s200 == doctest::Approx(0.001));
}

TEST_CASE("pgm rasters are written with exact scaling") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 2, 3);
  ExceedanceMap map;
  for (const GridCell& c : area.cells()) {
    map.cells.push_back(c.cell_id);
    map.counts.push_back(c.cell_id);  // 0..5
  }
  const std::string path = "/tmp/airgrid_test.pgm";
  write_exceedance_pgm(map, area, path);
  std::ifstream in(path);
  std::string magic;
  int w, h, maxv;
  in >> magic >> w >> h >> maxv;
  CHECK(magic == "P2");
  CHECK(w == 3);
  CHECK(h == 2);
  CHECK(maxv == 255);
  std::vector<int> pixels(6);
  for (int& p : pixels) in >> p;
  // top row of the image is the top grid row (row 1): cells 3,4,5
  CHECK(pixels[0] == static_cast<int>(std::lround(255.0 * 3 / 5)));
  CHECK(pixels[5] == static_cast<int>(std::lround(255.0 * 2 / 5)));
}
