#include <doctest.h>

#include <cmath>
#include <numeric>

#include "airgrid/errors.hpp"
#include "airgrid/geometry.hpp"
#include "airgrid/ingest.hpp"
#include "airgrid/rng.hpp"

using namespace airgrid;

namespace {

Measurement meas(const char* station, Pollutant p, int64_t hour, double value) {
  return Measurement{station, p, UtcHour{hour}, value};
}

}  // namespace

TEST_CASE("clean_measurements drops negatives and keeps order and values") {
  const std::vector<Measurement> raw = {meas("a", Pollutant::kNO2, 0, -1.0),
                                        meas("a", Pollutant::kNO2, 1, 5.0),
                                        meas("a", Pollutant::kO3, 2, 3.2)};
  const CleanResult r = clean_measurements(raw);
  REQUIRE(r.kept.size() == 2);
  CHECK(r.kept[0].value == 5.0);
  CHECK(r.kept[1].value == 3.2);
  CHECK(r.removed_per_pollutant[static_cast<int>(Pollutant::kNO2)] == 1);
  CHECK(r.removed_total() == 1);

  const CleanResult all_kept = clean_measurements(r.kept);
  CHECK(all_kept.kept.size() == 2);
  CHECK(all_kept.removed_total() == 0);
  CHECK(clean_measurements({}).kept.empty());
}

TEST_CASE("clean_measurements counting oracle on 10k random values") {
  Rng rng(5);
  std::vector<Measurement> raw;
  int64_t expected_neg = 0;
  for (int i = 0; i < 10000; ++i) {
    double v = rng.uniform(-1.0, 30.0);
    if (rng.uniform01() >= 0.03 && v < 0) v = -v;  // about 3% stay negative
    if (v < 0) ++expected_neg;
    raw.push_back(meas("s", Pollutant::kPM25, i, v));
  }
  const CleanResult r = clean_measurements(raw);
  CHECK(static_cast<int64_t>(r.kept.size()) + r.removed_total() == 10000);
  CHECK(r.removed_total() == expected_neg);
  for (const Measurement& m : r.kept) CHECK(m.value >= 0.0);
}

TEST_CASE("segment clipping partitions polyline length across cells") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 10, 10);
  Rng rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Point> poly;
    const int n = 2 + static_cast<int>(rng.uniform_u64(5));
    for (int i = 0; i < n; ++i)
      poly.push_back({rng.uniform(100.0, 9900.0), rng.uniform(100.0, 9900.0)});
    const auto pieces = clip_polyline_to_cells(poly, area);
    double total = 0.0;
    for (const auto& [cell, len] : pieces) total += len;
    CHECK(std::fabs(total - polyline_length(poly)) < 1e-6);
  }
}

TEST_CASE("road features: motorway through a centroid") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 3, 3);
  // horizontal motorway straight through the middle row of centroids
  const RoadSegment seg{1, HighwayType::kMotorway, {{-500.0, 1500.0}, {3500.0, 1500.0}}};
  const auto features = road_structural_features(area, {seg});
  const CellId mid = area.cell_lookup(1500.0, 1500.0);
  const int m = static_cast<int>(HighwayType::kMotorway);
  CHECK(features[mid].distance_m[m] == 0.0);

  // chord-length oracle: dense point sampling of the polyline
  const int samples = 200000;
  int inside = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = (i + 0.5) / samples;
    const double x = -500.0 + t * 4000.0;
    if (x >= 1000.0 && x < 2000.0) ++inside;
  }
  const double oracle = 4000.0 * inside / samples;
  CHECK(features[mid].length_m[m] == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(features[mid].length_m[m] == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("road features: empty network gives sentinels and zero lengths") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 2, 2);
  const auto features = road_structural_features(area, {});
  for (const auto& f : features) {
    for (int t = 0; t < kNumHighwayTypes; ++t) {
      CHECK(f.distance_m[t] == kAbsentRoadDistance);
      CHECK(f.length_m[t] == 0.0);
    }
  }
}

TEST_CASE("road features: residential polyline of length 1000 inside one cell") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 3, 3);
  // 700 m up then 300 m across, all within cell (1,1)
  const RoadSegment inside{7, HighwayType::kResidential,
                           {{1050.0, 1200.0}, {1050.0, 1900.0}, {1350.0, 1900.0}}};
  const double len = polyline_length(inside.polyline);
  REQUIRE(len == doctest::Approx(1000.0));
  const auto features = road_structural_features(area, {inside});
  const CellId cell = area.cell_lookup(1100.0, 1500.0);
  const int r = static_cast<int>(HighwayType::kResidential);
  CHECK(features[cell].length_m[r] == doctest::Approx(len).epsilon(1e-12));
  for (const GridCell& c : area.cells()) {
    if (c.cell_id == cell) continue;
    CHECK(features[c.cell_id].length_m[r] == 0.0);
  }
}

TEST_CASE("traffic grid score: hand-summed oracle and properties") {
  TrafficMeans means;
  means.set("R", HighwayType::kResidential, TransportMode::kCarTaxi, 0.002);
  means.set("R", HighwayType::kMotorway, TransportMode::kCarTaxi, 0.05);

  RoadCellFeatures cell;
  cell.distance_m.fill(kAbsentRoadDistance);
  cell.length_m.fill(0.0);
  cell.length_m[static_cast<int>(HighwayType::kResidential)] = 1000.0;
  cell.length_m[static_cast<int>(HighwayType::kMotorway)] = 500.0;

  const auto score = traffic_grid_score(cell, means, "R");
  CHECK(score[static_cast<int>(TransportMode::kCarTaxi)] ==
        doctest::Approx(1000.0 * 0.002 + 500.0 * 0.05).epsilon(1e-12));

  RoadCellFeatures empty;
  empty.distance_m.fill(kAbsentRoadDistance);
  empty.length_m.fill(0.0);
  for (double v : traffic_grid_score(empty, means, "R")) CHECK(v == 0.0);

  RoadCellFeatures doubled = cell;
  for (double& v : doubled.length_m) v *= 2.0;
  const auto score2 = traffic_grid_score(doubled, means, "R");
  for (int m = 0; m < kNumTransportModes; ++m)
    CHECK(score2[m] == doctest::Approx(2.0 * score[m]).epsilon(1e-12));

  CHECK_THROWS_AS(traffic_grid_score(cell, means, "nowhere"), ValidationError);
}

TEST_CASE("footways never carry traffic means") {
  TrafficMeans means;
  CHECK_THROWS_AS(means.set("R", HighwayType::kFootway, TransportMode::kBicycle, 1.0),
                  ValidationError);
  CHECK_FALSE(is_motor_highway(HighwayType::kCycleway));
  CHECK(is_motor_highway(HighwayType::kTrack));
}

TEST_CASE("temporal_distribute conserves daily totals") {
  std::array<double, 24> uniform;
  uniform.fill(1.0 / 24.0);
  for (int h = 0; h < 24; ++h)
    CHECK(temporal_distribute(24.0, uniform, h) == doctest::Approx(1.0).epsilon(1e-12));

  std::array<double, 24> delta{};
  delta[8] = 1.0;
  CHECK(temporal_distribute(37.5, delta, 8) == 37.5);
  CHECK(temporal_distribute(37.5, delta, 9) == 0.0);

  Rng rng(3);
  std::array<double, 24> raw{};
  for (double& v : raw) v = rng.uniform01();
  TravelProfiles profiles;
  profiles.set("R", DayKind::kWeekday, TransportMode::kLGV, raw);
  const auto& p = profiles.profile("R", DayKind::kWeekday, TransportMode::kLGV);
  double total = 0.0;
  for (int h = 0; h < 24; ++h) total += temporal_distribute(123.456, p, h);
  CHECK(total == doctest::Approx(123.456).epsilon(1e-9));
}

TEST_CASE("travel profile loading rejects an all-zero profile") {
  TravelProfiles profiles;
  std::array<double, 24> zeros{};
  CHECK_THROWS_AS(profiles.set("R", DayKind::kSunday, TransportMode::kHGV, zeros),
                  ValidationError);
}

TEST_CASE("idw interpolation exactness and bounds") {
  const std::vector<PointSample> one = {{100.0, 100.0, 42.0}};
  const Point targets[] = {{0.0, 0.0}, {5000.0, 5000.0}};
  const auto v = idw_interpolate(one, targets);
  CHECK(v[0] == 42.0);
  CHECK(v[1] == 42.0);

  const std::vector<PointSample> pair = {{0.0, 0.0, 10.0}, {100.0, 0.0, 20.0}};
  const Point mid[] = {{50.0, 0.0}};
  CHECK(idw_interpolate(pair, mid)[0] == doctest::Approx(15.0).epsilon(1e-12));

  const Point on_node[] = {{100.0, 0.0}};
  CHECK(idw_interpolate(pair, on_node)[0] == 20.0);

  CHECK_THROWS_AS(idw_interpolate({}, mid), ValidationError);

  Rng rng(11);
  std::vector<PointSample> cloud;
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 40; ++i) {
    const double value = rng.uniform(-5.0, 9.0);
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    cloud.push_back({rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0), value});
  }
  std::vector<Point> probes;
  for (int i = 0; i < 200; ++i)
    probes.push_back({rng.uniform(0.0, 1000.0), rng.uniform(0.0, 1000.0)});
  for (double v2 : idw_interpolate(cloud, probes)) {
    CHECK(v2 >= lo - 1e-12);
    CHECK(v2 <= hi + 1e-12);
  }
}

namespace {

std::vector<RemoteSensingSample> full_coverage_samples(const StudyArea& area, double value) {
  std::vector<RemoteSensingSample> s;
  for (const GridCell& c : area.cells())
    for (int v = 0; v < kNumRemoteSensingVariables; ++v)
      for (int m = 1; m <= 12; ++m) s.push_back({v, c.cell_id, m, value});
  return s;
}

}  // namespace

TEST_CASE("monthly composite: uniform coverage and neighborhood fill") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 3, 3);
  auto samples = full_coverage_samples(area, 7.0);
  const MonthlyComposite uniform = MonthlyComposite::build(area, samples);
  for (const GridCell& c : area.cells())
    CHECK(uniform.value_at_month(0, c.cell_id, 6) == 7.0);
  // backfill: any timestamp maps to its month
  CHECK(uniform.value_at(0, 0, make_hour(1999, 6, 15, 3)) == 7.0);

  // hole at the centre cell, surrounded by 8 cells of 7 -> filled with 7
  const CellId centre = area.cell_lookup(1500.0, 1500.0);
  std::vector<RemoteSensingSample> holed;
  for (const auto& s : samples)
    if (!(s.cell == centre && s.month == 4)) holed.push_back(s);
  const MonthlyComposite filled = MonthlyComposite::build(area, holed);
  CHECK(filled.value_at_month(0, centre, 4) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("monthly composite: checkerboard hole matches brute-force neighborhood mean") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 5, 5);
  const CellId hole = area.cell_lookup(2500.0, 2500.0);
  std::vector<RemoteSensingSample> samples;
  for (const GridCell& c : area.cells()) {
    if (c.cell_id == hole) continue;
    const double v = (c.row + c.col) % 2 == 0 ? 0.0 : 10.0;
    samples.push_back({0, c.cell_id, 1, v});
  }
  // other variables and months get flat coverage so the build succeeds
  for (const GridCell& c : area.cells())
    for (int v = 0; v < kNumRemoteSensingVariables; ++v)
      for (int m = 1; m <= 12; ++m)
        if (!(v == 0 && m == 1)) samples.push_back({v, c.cell_id, m, 1.0});

  const MonthlyComposite composite = MonthlyComposite::build(area, samples);

  double sum = 0.0;
  int n = 0;
  const GridCell& hc = area.cell(hole);
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const int r = hc.row + dr, c = hc.col + dc;
      if (r < 0 || r >= 5 || c < 0 || c >= 5) continue;
      sum += (r + c) % 2 == 0 ? 0.0 : 10.0;
      ++n;
    }
  CHECK(composite.value_at_month(0, hole, 1) == doctest::Approx(sum / n).epsilon(1e-12));
}

TEST_CASE("monthly composite: gap fill is idempotent and empty months fail") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 3, 3);
  MonthlyComposite complete = MonthlyComposite::build(area, full_coverage_samples(area, 3.5));
  MonthlyComposite again = complete;
  again.fill_gaps(area);
  for (const GridCell& c : area.cells())
    for (int m = 1; m <= 12; ++m)
      CHECK(again.value_at_month(2, c.cell_id, m) == complete.value_at_month(2, c.cell_id, m));

  std::vector<RemoteSensingSample> missing_month;
  for (const auto& s : full_coverage_samples(area, 1.0))
    if (!(s.variable == 1 && s.month == 9)) missing_month.push_back(s);
  CHECK_THROWS_AS(MonthlyComposite::build(area, missing_month), DataGapError);
}

TEST_CASE("emissions scaling: identity, pointwise factors, linearity") {
  EmissionsMap map(4);
  map.add_annual(EmissionSpecies::kNOx, 7, 2, 100.0);
  std::array<double, 168> flat_h;
  flat_h.fill(1.0);
  std::array<double, 12> flat_m;
  flat_m.fill(1.0);
  for (int sec = 1; sec <= kNumSnapSectors; ++sec) map.set_hour_factors(sec, flat_h);
  for (int sp = 0; sp < kNumEmissionSpecies; ++sp)
    for (int sec = 1; sec <= kNumSnapSectors; ++sec)
      map.set_month_factors(static_cast<EmissionSpecies>(sp), sec, flat_m);

  const UtcHour t = make_hour(2018, 6, 1, 8);
  CHECK(map.scaled(EmissionSpecies::kNOx, 7, 2, t) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(map.scaled(EmissionSpecies::kNOx, 7, 0, t) == 0.0);

  // hour factor 1.5 and month factor 0.8 at the probed slots, tables mean 1
  const TemporalFeatures tf = temporal_features(t);
  std::array<double, 168> h15;
  h15.fill((168.0 - 1.5) / 167.0);
  h15[tf.day_of_week * 24 + tf.hour] = 1.5;
  map.set_hour_factors(7, h15);
  std::array<double, 12> m08;
  m08.fill((12.0 - 0.8) / 11.0);
  m08[tf.month - 1] = 0.8;
  map.set_month_factors(EmissionSpecies::kNOx, 7, m08);
  CHECK(map.scaled(EmissionSpecies::kNOx, 7, 2, t) ==
        doctest::Approx(100.0 * 1.5 * 0.8).epsilon(1e-9));

  // linearity in the annual value
  map.add_annual(EmissionSpecies::kNOx, 7, 2, 100.0);  // doubles the annual mass
  CHECK(map.scaled(EmissionSpecies::kNOx, 7, 2, t) ==
        doctest::Approx(2.0 * 100.0 * 1.5 * 0.8).epsilon(1e-9));
}

TEST_CASE("emissions scaling conserves annual mass over a full year") {
  EmissionsMap map(1);
  map.add_annual(EmissionSpecies::kCO, 2, 0, 1000.0);
  // non-trivial shapes; the loader renormalizes them to mean 1
  std::array<double, 168> hf;
  for (int i = 0; i < 168; ++i) hf[i] = 0.4 + std::fabs(std::sin(0.13 * i)) * 1.7;
  map.set_hour_factors(2, hf);
  std::array<double, 12> mf;
  for (int i = 0; i < 12; ++i) mf[i] = 0.6 + 0.8 * std::fabs(std::cos(0.5 * i));
  map.set_month_factors(EmissionSpecies::kCO, 2, mf);

  // full-year summation oracle over the 8760 hours of 2018
  double sum = 0.0;
  const UtcHour start = make_hour(2018, 1, 1, 0);
  for (int h = 0; h < 8760; ++h)
    sum += map.scaled(EmissionSpecies::kCO, 2, 0, start + h);
  const double mean = sum / 8760.0;
  CHECK(std::fabs(mean - 1000.0) / 1000.0 < 0.005);
}

TEST_CASE("missing scaling rows surface as data gaps") {
  EmissionsMap map(1);
  map.add_annual(EmissionSpecies::kSOx, 4, 0, 5.0);
  CHECK_THROWS_AS(map.scaled(EmissionSpecies::kSOx, 4, 0, make_hour(2018, 1, 1, 0)),
                  DataGapError);
}

TEST_CASE("land use profiles enforce the pixel budget") {
  LandUseProfiles profiles(2);
  std::array<int32_t, kNumLandUseClasses> counts{};
  counts[0] = 1600;
  profiles.set(0, counts);
  CHECK(profiles.counts(0)[0] == 1600);
  counts[0] = 1599;
  CHECK_THROWS_AS(profiles.set(1, counts), ValidationError);
  CHECK_THROWS_AS(profiles.counts(1), DataGapError);
}

TEST_CASE("day kind follows the weekday") {
  CHECK(day_kind_of(make_hour(2018, 1, 19, 8)) == DayKind::kWeekday);   // Friday
  CHECK(day_kind_of(make_hour(2018, 1, 20, 8)) == DayKind::kSaturday);
  CHECK(day_kind_of(make_hour(2018, 1, 21, 8)) == DayKind::kSunday);
}
