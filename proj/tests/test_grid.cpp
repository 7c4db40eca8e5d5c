#include <doctest.h>

#include <cmath>
#include <set>

#include "airgrid/errors.hpp"
#include "airgrid/grid.hpp"
#include "airgrid/rng.hpp"

using namespace airgrid;

TEST_CASE("single-cell area puts the centroid in the middle") {
  const StudyArea area = build_study_area({0, 0}, 1000.0, {{0, 0}});
  REQUIRE(area.cell_count() == 1);
  CHECK(area.cells()[0].centroid_x == 500.0);
  CHECK(area.cells()[0].centroid_y == 500.0);
}

TEST_CASE("full 20x20 mask yields 400 distinct cells with exact centroids") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 20, 20);
  REQUIRE(area.cell_count() == 400);
  std::set<CellId> ids;
  for (const GridCell& c : area.cells()) {
    ids.insert(c.cell_id);
    CHECK(c.centroid_x == (c.col + 0.5) * 1000.0);
    CHECK(c.centroid_y == (c.row + 0.5) * 1000.0);
  }
  CHECK(ids.size() == 400);
}

TEST_CASE("grid construction is deterministic") {
  const std::vector<std::pair<int32_t, int32_t>> mask = {{3, 1}, {0, 0}, {2, 2}, {0, 1}};
  const StudyArea a = build_study_area({10, 20}, 500.0, mask);
  std::vector<std::pair<int32_t, int32_t>> reversed(mask.rbegin(), mask.rend());
  const StudyArea b = build_study_area({10, 20}, 500.0, reversed);
  REQUIRE(a.cell_count() == b.cell_count());
  for (size_t i = 0; i < a.cell_count(); ++i) {
    CHECK(a.cells()[i].cell_id == b.cells()[i].cell_id);
    CHECK(a.cells()[i].row == b.cells()[i].row);
    CHECK(a.cells()[i].col == b.cells()[i].col);
  }
}

TEST_CASE("construction rejects bad inputs") {
  CHECK_THROWS_AS(build_study_area({0, 0}, 1000.0, {}), ValidationError);
  CHECK_THROWS_AS(build_study_area({0, 0}, 0.0, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(build_study_area({0, 0}, -5.0, {{0, 0}}), ValidationError);
}

TEST_CASE("snap distance at a cell corner matches plane geometry") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 2, 2);
  // oracle: sqrt(500^2 + 500^2)
  const double oracle = std::sqrt(500.0 * 500.0 + 500.0 * 500.0);
  const auto [cell, dist] = area.snap_to_centroid({1000.0 - 1e-9, 1000.0 - 1e-9});
  CHECK(cell == area.cell_lookup(999.0, 999.0));
  CHECK(dist == doctest::Approx(oracle).epsilon(1e-9));

  const auto [c2, d2] = area.snap_to_centroid({500.0, 500.0});
  CHECK(d2 == 0.0);
  CHECK(c2 == cell);
}

TEST_CASE("half-open cell convention at boundaries") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 3, 3);
  const CellId c00 = area.cell_lookup(500.0, 500.0);
  CHECK(area.cell(c00).row == 0);
  CHECK(area.cell(c00).col == 0);
  CHECK(area.cell_lookup(999.999, 0.001) == c00);
  const CellId c11 = area.cell_lookup(1000.0, 1000.0);
  CHECK(area.cell(c11).row == 1);
  CHECK(area.cell(c11).col == 1);
}

TEST_CASE("out-of-mask lookups fail explicitly") {
  const StudyArea area = build_study_area({0, 0}, 1000.0, {{0, 0}, {1, 1}});
  CHECK_THROWS_AS(area.cell_lookup(1500.0, 500.0), ValidationError);  // masked out
  CHECK_THROWS_AS(area.cell_lookup(-0.000001, 500.0), ValidationError);
  CHECK_THROWS_AS(area.snap_to_centroid({5000.0, 5000.0}), ValidationError);
}

TEST_CASE("snap and lookup agree over random points with bounded distance") {
  const double s = 750.0;
  const StudyArea area = build_rect_study_area({-2000, 1000}, s, 8, 11);
  const double bound = s * std::sqrt(2.0) / 2.0;
  Rng rng(42);
  for (int i = 0; i < 2000; ++i) {
    const Point p{-2000 + rng.uniform01() * 11 * s, 1000 + rng.uniform01() * 8 * s};
    const auto [cell, dist] = area.snap_to_centroid(p);
    CHECK(cell == area.cell_lookup(p.x, p.y));
    CHECK(dist <= bound + 1e-9);
    const GridCell& c = area.cell(cell);
    CHECK(p.x >= c.centroid_x - s / 2);
    CHECK(p.x < c.centroid_x + s / 2);
  }
}

TEST_CASE("station abstraction records the snap distance") {
  const StudyArea area = build_rect_study_area({0, 0}, 1000.0, 4, 4);
  const StationSite st = area.make_station("AB1", "Test Site",
                                           EnvironmentClass::kUrbanTraffic, {1234.0, 2777.0});
  CHECK(st.snapped_cell == area.cell_lookup(1234.0, 2777.0));
  const GridCell& c = area.cell(st.snapped_cell);
  const double expect = std::hypot(1234.0 - c.centroid_x, 2777.0 - c.centroid_y);
  CHECK(st.abstraction_distance_m == doctest::Approx(expect).epsilon(1e-12));
  CHECK(st.abstraction_distance_m <= 1000.0 * std::sqrt(2.0) / 2.0);
}

TEST_CASE("study area file round-trips") {
  const StudyArea area =
      build_study_area({-350.5, 12.25}, 250.0, {{0, 0}, {0, 2}, {5, 1}});
  const std::string path = "/tmp/airgrid_area_test.csv";
  area.save(path);
  const StudyArea loaded = StudyArea::load(path);
  REQUIRE(loaded.cell_count() == area.cell_count());
  CHECK(loaded.cell_size() == area.cell_size());
  CHECK(loaded.origin_x() == area.origin_x());
  for (size_t i = 0; i < area.cell_count(); ++i) {
    CHECK(loaded.cells()[i].row == area.cells()[i].row);
    CHECK(loaded.cells()[i].col == area.cells()[i].col);
    CHECK(loaded.cells()[i].centroid_x == area.cells()[i].centroid_x);
  }
}
