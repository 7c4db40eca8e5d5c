#pragma once

#include <cstdlib>
#include <string>

#include "airgrid/train.hpp"
#include "airgrid/worldgen.hpp"

namespace airgrid::testfixture {

inline std::string temp_root() {
  const char* env = std::getenv("TMPDIR");
  return std::string(env ? env : "/tmp") + "/airgrid_test_fixture";
}

// One small shared world per test-binary run: 6x6 grid, 2014-2015, 12 stations.
inline const std::string& world_dir() {
  static const std::string dir = [] {
    SyntheticWorldSpec spec;
    spec.rows = 6;
    spec.cols = 6;
    spec.years = {2014, 2015};
    spec.measurement_coverage = 0.3;
    spec.seed = 4242;
    const std::string d = temp_root() + "/world";
    generate_world(spec, d);
    return d;
  }();
  return dir;
}

inline WorldData& world() {
  static WorldData w = WorldData::load(world_dir());
  return w;
}

inline TrainingTable& table() {
  static TrainingTable t = [] {
    WorldData& w = world();
    const CleanResult cleaned = clean_measurements(w.raw_measurements);
    return build_training_table(w.store, w.stations, cleaned.kept, Pollutant::kNO2);
  }();
  return t;
}

// A quick full-schema model for prediction-path tests.
inline const gbdt::Ensemble& model() {
  static const gbdt::Ensemble m = [] {
    const TrainingTable& t = table();
    std::vector<size_t> train_idx, valid_idx;
    for (size_t i = 0; i < t.n_rows(); ++i)
      (i % 5 == 4 ? valid_idx : train_idx).push_back(i);
    // thin the training side for speed
    std::vector<size_t> thin;
    for (size_t i = 0; i < train_idx.size(); i += 3) thin.push_back(train_idx[i]);
    const TrainingTable train = t.select(thin);
    const TrainingTable valid = t.select(valid_idx);
    gbdt::TrainConfig config;
    config.num_leaves = 31;
    config.min_data_in_leaf = 10;
    config.max_trees = 50;
    config.learning_rate = 0.2;
    config.seed = 99;
    gbdt::Ensemble model =
        gbdt::fit(train.view(), train.y, valid.view(), valid.y, t.column_names(), config);
    model.schema_hash = t.X.schema.hash();
    return model;
  }();
  return m;
}

}  // namespace airgrid::testfixture
