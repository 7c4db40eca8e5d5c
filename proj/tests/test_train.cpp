#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "airgrid/errors.hpp"
#include "airgrid/rng.hpp"
#include "airgrid/train.hpp"

using namespace airgrid;

namespace {

// In-memory synthetic stations sharing one generating function; bypasses the
// file pipeline so protocol tests stay fast.
TrainingTable synthetic_table(int n_stations, int rows_per_station_year, uint64_t seed,
                              int adversarial_index = -1) {
  Rng rng(seed);
  TrainingTable t;
  t.X.schema = FeatureSchema::full().subset({FeatureFamily::kMeteorology});
  const size_t w = t.X.schema.size();  // 11 columns, first 3 carry signal

  for (int s = 0; s < n_stations; ++s) {
    const double site_level = rng.uniform(0.0, 1.0);  // mild per-station offset
    for (int year : {2016, 2017, 2018}) {
      for (int i = 0; i < rows_per_station_year; ++i) {
        std::vector<double> row(w, 0.0);
        row[0] = rng.uniform(0, 10);
        row[1] = rng.uniform(0, 1);
        row[2] = site_level + rng.uniform(0, 1);
        for (size_t c = 3; c < w; ++c) row[c] = rng.uniform(-1, 1);
        const double signal = 2.5 * row[0] + 6.0 * (row[1] > 0.5 ? 1.0 : 0.0) + 1.0 * row[2];
        double y = std::max(0.0, signal + rng.normal(0, 0.15));
        if (s == adversarial_index) y = std::max(0.0, 45.0 - signal + rng.normal(0, 0.15));
        t.X.values.insert(t.X.values.end(), row.begin(), row.end());
        const UtcHour ts = make_hour(year, 1 + static_cast<int>(rng.uniform_u64(12)),
                                     1 + static_cast<int>(rng.uniform_u64(28)),
                                     static_cast<int>(rng.uniform_u64(24)));
        t.X.keys.emplace_back(CellId{s}, ts);
        t.timestamps.push_back(ts);
        char id[8];
        std::snprintf(id, sizeof id, "S%02d", s);
        t.station_ids.push_back(id);
        t.y.push_back(y);
      }
    }
  }
  return t;
}

ExperimentOptions fast_options(uint64_t seed) {
  ExperimentOptions o;
  o.split.train_years = {2016};
  o.split.validation_years = {2017};
  o.split.test_years = {2018};
  o.space.num_leaves_min = 8;
  o.space.num_leaves_max = 32;
  o.space.min_data_in_leaf_min = 5;
  o.space.min_data_in_leaf_max = 30;
  o.n_configs = 2;
  o.base.max_trees = 60;
  o.seed = seed;
  o.subset = "Meteorology";
  return o;
}

}  // namespace

TEST_CASE("split spec validation") {
  SplitSpec ok{{2014, 2015, 2016}, {2017}, {2018}};
  ok.validate();
  SplitSpec overlap{{2016}, {2016}, {2018}};
  CHECK_THROWS_AS(overlap.validate(), ValidationError);
  SplitSpec empty{{2016}, {}, {2018}};
  CHECK_THROWS_AS(empty.validate(), ValidationError);
}

TEST_CASE("temporal split partitions by calendar year") {
  const SplitSpec spec{{2014, 2015, 2016}, {2017}, {2018}};

  SUBCASE("one row per year gives sizes (3,1,1)") {
    std::vector<UtcHour> ts;
    for (int y : {2014, 2015, 2016, 2017, 2018}) ts.push_back(make_hour(y, 6, 1, 0));
    const SplitIndices idx = temporal_split(ts, spec);
    CHECK(idx.train.size() == 3);
    CHECK(idx.valid.size() == 1);
    CHECK(idx.test.size() == 1);
  }

  SUBCASE("rows confined to one year leave other splits empty") {
    std::vector<UtcHour> ts(10, make_hour(2017, 1, 1, 0));
    CHECK_THROWS_AS(temporal_split(ts, spec), ValidationError);
  }

  SUBCASE("counting oracle over 10k random timestamps") {
    Rng rng(3);
    std::vector<UtcHour> ts;
    for (int i = 0; i < 10000; ++i)
      ts.push_back(make_hour(2014 + static_cast<int>(rng.uniform_u64(5)),
                             1 + static_cast<int>(rng.uniform_u64(12)),
                             1 + static_cast<int>(rng.uniform_u64(28)),
                             static_cast<int>(rng.uniform_u64(24))));
    const SplitIndices idx = temporal_split(ts, spec);
    CHECK(idx.train.size() + idx.valid.size() + idx.test.size() == 10000);
    for (size_t i : idx.test) CHECK(year_of(ts[i]) == 2018);
    for (size_t i : idx.train) CHECK(year_of(ts[i]) <= 2016);
  }
}

TEST_CASE("random search picks the lowest validation MSE deterministically") {
  const TrainingTable table = synthetic_table(4, 80, 51);
  const SplitIndices idx = temporal_split(table.timestamps,
                                          {{2016}, {2017}, {2018}});
  const TrainingTable train = table.select(idx.train);
  const TrainingTable valid = table.select(idx.valid);

  SearchSpace space;
  space.num_leaves_min = 4;
  space.num_leaves_max = 40;
  space.min_data_in_leaf_min = 2;
  space.min_data_in_leaf_max = 30;
  space.l2_lambda_min = 1e-3;
  space.l2_lambda_max = 1e6;  // wide: some trials collapse toward the base score
  gbdt::TrainConfig base;
  base.max_trees = 40;

  const SearchResult a = random_search(train, valid, space, base, 6, 1234);
  const SearchResult b = random_search(train, valid, space, base, 6, 1234);
  CHECK(a.best_index == b.best_index);
  REQUIRE(a.trials.size() == 6);
  for (size_t i = 0; i < 6; ++i) {
    CHECK(a.trials[i].config.num_leaves == b.trials[i].config.num_leaves);
    CHECK(a.trials[i].config.l2_lambda == b.trials[i].config.l2_lambda);
    if (a.trials[i].ok) CHECK(a.trials[i].valid_mse_log == b.trials[i].valid_mse_log);
  }

  // argmin oracle over the recorded trials
  size_t best = 0;
  bool any = false;
  for (size_t i = 0; i < a.trials.size(); ++i) {
    if (!a.trials[i].ok) continue;
    if (!any || a.trials[i].valid_mse_log < a.trials[best].valid_mse_log) {
      best = i;
      any = true;
    }
  }
  CHECK(a.best_index == best);

  const SearchResult single = random_search(train, valid, space, base, 1, 9);
  CHECK(single.best_index == 0);

  // parallel trial execution must not change the outcome
  const SearchResult par = random_search(train, valid, space, base, 6, 1234, 4);
  CHECK(par.best_index == a.best_index);
  for (size_t i = 0; i < 6; ++i)
    if (a.trials[i].ok) CHECK(par.trials[i].valid_mse_log == a.trials[i].valid_mse_log);
}

TEST_CASE("final fit refits on train+valid and scores the test set") {
  const TrainingTable table = synthetic_table(4, 100, 52);
  const SplitIndices idx = temporal_split(table.timestamps, {{2016}, {2017}, {2018}});
  std::vector<size_t> tv(idx.train);
  tv.insert(tv.end(), idx.valid.begin(), idx.valid.end());

  gbdt::TrainConfig config;
  config.num_leaves = 31;
  config.min_data_in_leaf = 5;
  config.max_trees = 80;
  config.seed = 7;

  const FinalFitResult r =
      final_fit(config, table.select(tv), table.select(idx.test));
  REQUIRE(r.test.r2.has_value());
  CHECK(*r.test.r2 >= 0.95);

  // determinism: identical inputs and seed give identical ensembles
  const FinalFitResult r2 =
      final_fit(config, table.select(tv), table.select(idx.test));
  const std::string pa = "/tmp/airgrid_final_a.txt", pb = "/tmp/airgrid_final_b.txt";
  r.model.save(pa);
  r2.model.save(pb);
  std::ifstream fa(pa), fb(pb);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());

  // constant targets cannot beat the mean on a varying test set
  TrainingTable flat = table;
  for (size_t i : tv) flat.y[i] = 8.0;
  const FinalFitResult rc = final_fit(config, flat.select(tv), flat.select(idx.test));
  REQUIRE(rc.test.r2.has_value());
  CHECK(*rc.test.r2 <= 0.0);
}

TEST_CASE("family selection resolves presets and rejects junk") {
  CHECK(resolve_family_selection("All").size() == 7);
  const auto global = resolve_family_selection("Global");
  CHECK(global.size() == 3);
  const auto forecasting = resolve_family_selection("Forecasting");
  CHECK(forecasting.size() == 4);
  const auto pair = resolve_family_selection("Temporal,Emissions");
  CHECK(pair.size() == 2);
  CHECK_THROWS_AS(resolve_family_selection(""), ValidationError);
  CHECK_THROWS_AS(resolve_family_selection("NotAFamily"), ValidationError);

  // preset column counts on the full schema
  const FeatureSchema& schema = FeatureSchema::full();
  CHECK(schema.subset(resolve_family_selection("All")).size() == 152);
  CHECK(schema.subset(resolve_family_selection("Global")).size() == 20);
  CHECK(schema.subset(resolve_family_selection("Forecasting")).size() == 65);
  CHECK(schema.subset({FeatureFamily::kTemporal}).size() == 4);
}

TEST_CASE("loov: fold partition, shared-function stations score, adversarial fails") {
  const int n_stations = 11;
  const TrainingTable table = synthetic_table(n_stations, 120, 53, /*adversarial=*/10);
  ExperimentOptions options = fast_options(99);
  options.loov_folds = 5;
  options.base.max_trees = 80;

  const auto scores = loov_experiment(table, options);
  REQUIRE(scores.size() == static_cast<size_t>(n_stations));

  // every station exactly once
  std::set<std::string> seen;
  for (const auto& s : scores) seen.insert(s.station_id);
  CHECK(seen.size() == static_cast<size_t>(n_stations));

  const LoovSummary summary = summarize_loov(scores);
  CHECK(summary.n_scored == n_stations);
  CHECK(summary.median >= 0.8);
  for (const auto& s : scores)
    if (s.station_id == "S10") {
      REQUIRE(s.r2.has_value());
      CHECK(*s.r2 < 0.0);
    }
  CHECK(summary.min < 0.0);
  CHECK(summary.max <= 1.0);
}

TEST_CASE("loov: a station with one observation is skipped") {
  TrainingTable table = synthetic_table(6, 50, 54);
  // append a 7th station with a single row (constant series would also skip)
  TrainingTable extra = synthetic_table(1, 1, 55);
  // only keep its single 2016 row; rename the station
  std::vector<size_t> one = {0};
  TrainingTable single = extra.select(one);
  single.station_ids[0] = "S99";
  const size_t w = table.X.schema.size();
  table.X.values.insert(table.X.values.end(), single.X.values.begin(),
                        single.X.values.begin() + static_cast<ptrdiff_t>(w));
  table.X.keys.push_back(single.X.keys[0]);
  table.y.push_back(single.y[0]);
  table.station_ids.push_back("S99");
  table.timestamps.push_back(single.timestamps[0]);

  ExperimentOptions options = fast_options(3);
  options.loov_folds = 5;
  const auto scores = loov_experiment(table, options);
  bool found = false;
  for (const auto& s : scores)
    if (s.station_id == "S99") {
      found = true;
      CHECK(s.skipped);
      CHECK_FALSE(s.r2.has_value());
    }
  CHECK(found);
}

TEST_CASE("run_experiment restricts columns and leaves no leakage") {
  const TrainingTable table = synthetic_table(5, 70, 56);
  ExperimentOptions options = fast_options(4);
  options.subset = "Meteorology";

  const ExperimentReport report = run_experiment(table, "NO2", options);
  CHECK(report.n_columns == 11);
  CHECK(report.subset_label == "Meteorology");
  REQUIRE(report.test.r2.has_value());
  CHECK(*report.test.r2 > 0.8);

  // one peak report per station in the test year, mean matching the hand sum
  CHECK(report.peaks.size() == 5);
  REQUIRE(report.mean_peak_distance_pct.has_value());
  double sum = 0.0;
  for (const PeakReport& p : report.peaks) {
    CHECK(p.pollutant == "NO2");
    CHECK(year_of(p.peak_timestamp) == 2018);
    sum += p.peak_distance_pct;
  }
  CHECK(*report.mean_peak_distance_pct ==
        doctest::Approx(sum / 5.0).epsilon(1e-12));

  // structural no-leakage: train/test keys disjoint by construction
  const SplitIndices idx = temporal_split(table.timestamps, options.split);
  std::set<std::pair<CellId, int64_t>> train_keys, test_keys;
  for (size_t i : idx.train)
    train_keys.insert({table.X.keys[i].first, table.X.keys[i].second.value});
  for (size_t i : idx.test)
    test_keys.insert({table.X.keys[i].first, table.X.keys[i].second.value});
  for (const auto& k : test_keys) CHECK(train_keys.count(k) == 0);

  // identical options and seed reproduce the report numbers
  const ExperimentReport again = run_experiment(table, "NO2", options);
  CHECK(again.test.mse_log == report.test.mse_log);
  CHECK(*again.test.r2 == *report.test.r2);
  CHECK(again.chosen.num_leaves == report.chosen.num_leaves);
}

TEST_CASE("recipes parse and reject unknown keys") {
  const std::string path = "/tmp/airgrid_recipe_test.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "world_dir = /tmp/somewhere\n";
    out << "pollutant = O3\n";
    out << "families = Global\n";
    out << "train_years = 2014,2015,2016\n";
    out << "validation_years = 2017\n";
    out << "test_years = 2018\n";
    out << "n_configs = 5\n";
    out << "seed = 77\n";
    out << "run_loov = 1\n";
  }
  const Recipe r = load_recipe(path);
  CHECK(r.world_dir == "/tmp/somewhere");
  CHECK(r.pollutant == Pollutant::kO3);
  CHECK(r.options.subset == "Global");
  CHECK(r.options.split.train_years == std::set<int>{2014, 2015, 2016});
  CHECK(r.options.n_configs == 5);
  CHECK(r.options.seed == 77);
  CHECK(r.options.run_loov);

  {
    std::ofstream out(path);
    out << "world_dir = /tmp/x\nnot_a_key = 3\n";
  }
  CHECK_THROWS_WITH_AS(load_recipe(path), doctest::Contains("line 2"), ValidationError);
}
