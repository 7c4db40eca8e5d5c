#include <doctest.h>

#include <map>

#include "airgrid/errors.hpp"
#include "airgrid/feature_matrix.hpp"
#include "fixture.hpp"

using namespace airgrid;

TEST_CASE("full schema decomposes into the documented family sizes") {
  const FeatureSchema& schema = FeatureSchema::full();
  REQUIRE(schema.size() == 152);
  std::map<FeatureFamily, int> counts;
  for (const FeatureColumn& c : schema.columns()) counts[c.family]++;
  CHECK(counts[FeatureFamily::kTransportStructural] == 28);
  CHECK(counts[FeatureFamily::kTransportUse] == 5);
  CHECK(counts[FeatureFamily::kMeteorology] == 11);
  CHECK(counts[FeatureFamily::kRemoteSensing] == 5);
  CHECK(counts[FeatureFamily::kEmissions] == 77);
  CHECK(counts[FeatureFamily::kLandUse] == 22);
  CHECK(counts[FeatureFamily::kTemporal] == 4);
}

TEST_CASE("subset schemas keep full-schema column order") {
  const FeatureSchema& schema = FeatureSchema::full();
  const FeatureSchema sub = schema.subset(
      {FeatureFamily::kMeteorology, FeatureFamily::kTemporal, FeatureFamily::kRemoteSensing});
  CHECK(sub.size() == 11 + 5 + 4);
  for (size_t i = 1; i < sub.source_indices().size(); ++i)
    CHECK(sub.source_indices()[i - 1] < sub.source_indices()[i]);
  CHECK(sub.hash() != schema.hash());
  CHECK_THROWS_AS(schema.subset({}), ValidationError);
}

TEST_CASE("assembled rows carry 152 columns and obey request order") {
  const WorldData& world = testfixture::world();
  const UtcHour t0 = make_hour(2014, 3, 10, 6);
  const UtcHour t1 = make_hour(2015, 7, 2, 18);
  const std::vector<CellId> cells = {5, 17, 2};
  const std::vector<UtcHour> times = {t0, t1};

  const FeatureMatrix m = world.store.assemble(cells, times);
  REQUIRE(m.schema.size() == 152);
  REQUIRE(m.n_rows() == 6);
  CHECK(m.keys[0] == std::make_pair(CellId{5}, t0));
  CHECK(m.keys[1] == std::make_pair(CellId{5}, t1));
  CHECK(m.keys[4] == std::make_pair(CellId{2}, t0));

  // permuting the request permutes rows identically, never columns
  const FeatureMatrix p = world.store.assemble({2, 5, 17}, times);
  for (size_t i = 0; i < p.n_rows(); ++i) {
    const auto& key = p.keys[i];
    for (size_t j = 0; j < m.n_rows(); ++j) {
      if (m.keys[j] != key) continue;
      for (size_t c = 0; c < 152; ++c) CHECK(p.row(i)[c] == m.row(j)[c]);
    }
  }

  const FeatureMatrix single = world.store.assemble({5}, {t0});
  CHECK(single.n_rows() == 1);
}

TEST_CASE("temporal columns mirror the calendar decomposition") {
  const WorldData& world = testfixture::world();
  const UtcHour t = make_hour(2014, 1, 19, 8);  // Sunday, ISO week 3
  const FeatureMatrix m = world.store.assemble({0}, {t});
  const FeatureSchema& schema = FeatureSchema::full();
  const TemporalFeatures tf = temporal_features(t);
  CHECK(m.row(0)[schema.index_of("t_hour")] == tf.hour);
  CHECK(m.row(0)[schema.index_of("t_day_of_week")] == tf.day_of_week);
  CHECK(m.row(0)[schema.index_of("t_iso_week")] == tf.iso_week);
  CHECK(m.row(0)[schema.index_of("t_month")] == tf.month);
}

TEST_CASE("missing family data raises a gap error listing offenders") {
  const WorldData& world = testfixture::world();
  // 1999 is outside the generated years: no met samples, no road snapshot
  const UtcHour missing = make_hour(1999, 1, 1, 0);
  try {
    world.store.assemble({0, 1}, {missing});
    FAIL("expected DataGapError");
  } catch (const DataGapError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2 gap(s)") != std::string::npos);
  }
}

TEST_CASE("restricting a matrix to families keeps values aligned") {
  const WorldData& world = testfixture::world();
  const FeatureMatrix full = world.store.assemble({3}, {make_hour(2014, 5, 5, 5)});
  const FeatureMatrix met = full.restrict_to({FeatureFamily::kMeteorology});
  REQUIRE(met.schema.size() == 11);
  const size_t met_start = FeatureSchema::full().index_of("met_wind_u_100m");
  for (size_t i = 0; i < 11; ++i) CHECK(met.row(0)[i] == full.row(0)[met_start + i]);
}
