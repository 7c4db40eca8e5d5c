#include <doctest.h>

#include <cstring>

#include "airgrid/errors.hpp"
#include "airgrid/predict.hpp"
#include "fixture.hpp"

using namespace airgrid;

namespace {

int64_t hours_between(UtcHour a, UtcHour b) { return b - a + 1; }

}  // namespace

TEST_CASE("fill_gaps keeps measurements bitwise and fills the rest") {
  const WorldData& world = testfixture::world();
  const gbdt::Ensemble& model = testfixture::model();
  const StationSite& station = world.stations.front();

  const UtcHour begin = make_hour(2014, 2, 1, 0);
  const UtcHour end = make_hour(2014, 2, 7, 23);

  std::vector<Measurement> window;
  for (const Measurement& m : clean_measurements(world.raw_measurements).kept)
    if (m.station_id == station.station_id && begin <= m.timestamp && m.timestamp <= end)
      window.push_back(m);
  REQUIRE(window.size() > 10);

  const AugmentedSeries series =
      fill_gaps(window, model, world.store, station.station_id, Pollutant::kNO2,
                station.snapped_cell, begin, end);
  REQUIRE(static_cast<int64_t>(series.entries.size()) == hours_between(begin, end));

  size_t measured = 0;
  std::map<int64_t, double> by_hour;
  for (const Measurement& m : window) by_hour.emplace(m.timestamp.value, m.value);
  for (const AugmentedEntry& e : series.entries) {
    const auto it = by_hour.find(e.timestamp.value);
    if (it != by_hour.end()) {
      CHECK(e.source == ValueSource::kMeasured);
      CHECK(e.value == it->second);  // bitwise equality
      ++measured;
    } else {
      CHECK(e.source == ValueSource::kPredicted);
      CHECK(e.value >= 0.0);
    }
  }
  CHECK(measured == by_hour.size());
}

TEST_CASE("fill_gaps with no gaps returns the input; with no data, all predicted") {
  const WorldData& world = testfixture::world();
  const gbdt::Ensemble& model = testfixture::model();
  const StationSite& station = world.stations.front();

  // dense cover: one synthetic measurement for every hour of a short span
  const UtcHour begin = make_hour(2015, 3, 1, 0);
  const UtcHour end = make_hour(2015, 3, 2, 23);
  std::vector<Measurement> dense;
  for (int64_t h = 0; h < hours_between(begin, end); ++h)
    dense.push_back({station.station_id, Pollutant::kNO2, begin + h, 10.0 + h});
  const AugmentedSeries full = fill_gaps(dense, model, world.store, station.station_id,
                                         Pollutant::kNO2, station.snapped_cell, begin, end);
  for (size_t i = 0; i < full.entries.size(); ++i) {
    CHECK(full.entries[i].source == ValueSource::kMeasured);
    CHECK(full.entries[i].value == dense[i].value);
  }

  const AugmentedSeries empty = fill_gaps({}, model, world.store, station.station_id,
                                          Pollutant::kNO2, station.snapped_cell, begin, end);
  CHECK(static_cast<int64_t>(empty.entries.size()) == hours_between(begin, end));
  for (const auto& e : empty.entries) CHECK(e.source == ValueSource::kPredicted);
}

TEST_CASE("fill_gaps mid-span onboarding matches calendar arithmetic") {
  const WorldData& world = testfixture::world();
  const gbdt::Ensemble& model = testfixture::model();
  const StationSite& station = world.stations.front();

  // station comes online 2015-03-01: everything before is backdated
  const UtcHour span_begin = make_hour(2014, 1, 1, 0);
  const UtcHour span_end = make_hour(2015, 6, 30, 23);
  const UtcHour online = make_hour(2015, 3, 1, 0);

  std::vector<Measurement> since_online;
  for (const Measurement& m : clean_measurements(world.raw_measurements).kept)
    if (m.station_id == station.station_id && online <= m.timestamp &&
        m.timestamp <= span_end)
      since_online.push_back(m);
  REQUIRE_FALSE(since_online.empty());

  const AugmentedSeries series =
      fill_gaps(since_online, model, world.store, station.station_id, Pollutant::kNO2,
                station.snapped_cell, span_begin, span_end);

  // calendar counting oracle
  const int64_t span_hours = hours_between(span_begin, span_end);
  const int64_t before_online = online - span_begin;  // 2014 (365d) + Jan/Feb 2015 (59d)
  CHECK(span_hours == (365 + 181) * 24);
  CHECK(before_online == (365 + 59) * 24);
  REQUIRE(static_cast<int64_t>(series.entries.size()) == span_hours);

  int64_t measured = 0, predicted = 0;
  for (const AugmentedEntry& e : series.entries) {
    if (e.source == ValueSource::kMeasured) {
      ++measured;
      CHECK(e.timestamp >= online);
    } else {
      ++predicted;
    }
  }
  CHECK(measured == static_cast<int64_t>(since_online.size()));
  CHECK(predicted == span_hours - measured);
  // every pre-online hour is predicted
  for (int64_t h = 0; h < before_online; ++h)
    CHECK(series.entries[static_cast<size_t>(h)].source == ValueSource::kPredicted);
}

TEST_CASE("fill_gaps outside the feature span raises a gap error") {
  const WorldData& world = testfixture::world();
  const gbdt::Ensemble& model = testfixture::model();
  const StationSite& station = world.stations.front();
  CHECK_THROWS_AS(fill_gaps({}, model, world.store, station.station_id, Pollutant::kNO2,
                            station.snapped_cell, make_hour(2013, 12, 30, 0),
                            make_hour(2013, 12, 31, 23)),
                  DataGapError);
}

TEST_CASE("grid_predict matches single-row prediction and is worker-invariant") {
  const WorldData& world = testfixture::world();
  const gbdt::Ensemble& model = testfixture::model();

  SUBCASE("one cell, one timestamp") {
    const UtcHour t = make_hour(2014, 4, 4, 4);
    const GridPrediction p = grid_predict(model, world.store, {7}, {t}, 1);
    REQUIRE(p.keys.size() == 1);
    std::vector<double> row(kNumFeatureColumns);
    world.store.materialize_row(7, t, row);
    CHECK(p.values[0] == model.predict_row(row));
  }

  SUBCASE("worker counts produce identical bytes") {
    std::vector<CellId> cells;
    for (const GridCell& c : world.area.cells()) cells.push_back(c.cell_id);
    std::vector<UtcHour> times;
    for (int h = 0; h < 48; ++h) times.push_back(make_hour(2014, 6, 1, 0) + h);
    const GridPrediction one = grid_predict(model, world.store, cells, times, 1, 2048);
    const GridPrediction four = grid_predict(model, world.store, cells, times, 4, 2048);
    REQUIRE(one.values.size() == four.values.size());
    CHECK(std::memcmp(one.values.data(), four.values.data(),
                      one.values.size() * sizeof(double)) == 0);
    CHECK(one.keys == four.keys);
    for (double v : one.values) CHECK(v >= 0.0);
  }

  SUBCASE("identical rows give identical outputs") {
    // the same (cell, hour) requested through two different key paths
    const UtcHour t = make_hour(2015, 2, 2, 2);
    const GridPrediction a = grid_predict(model, world.store, {3, 3}, {t}, 1);
    CHECK(a.values[0] == a.values[1]);
  }
}
