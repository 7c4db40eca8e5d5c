#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "airgrid/eval.hpp"
#include "airgrid/feature_matrix.hpp"
#include "airgrid/gbdt.hpp"

namespace airgrid {

struct SplitSpec {
  std::set<int> train_years;
  std::set<int> validation_years;
  std::set<int> test_years;
  void validate() const;  // pairwise disjoint, each non-empty
};

struct SplitIndices {
  std::vector<size_t> train;
  std::vector<size_t> valid;
  std::vector<size_t> test;
};

// Partition by calendar year. Throws when any split ends up empty.
SplitIndices temporal_split(std::span<const UtcHour> timestamps, const SplitSpec& spec);

// Feature rows with aligned targets and station ids.
struct TrainingTable {
  FeatureMatrix X;
  std::vector<double> y;                  // ug/m3
  std::vector<std::string> station_ids;   // parallel to rows
  std::vector<UtcHour> timestamps;        // parallel to rows

  size_t n_rows() const { return y.size(); }
  TrainingTable select(std::span<const size_t> indices) const;
  TrainingTable restrict_to(const std::vector<FeatureFamily>& families) const;
  gbdt::DataView view() const { return {X.values.data(), n_rows(), X.schema.size()}; }
  std::vector<std::string> column_names() const;
};

class FeatureStore;
TrainingTable build_training_table(const FeatureStore& store,
                                   const std::vector<StationSite>& stations,
                                   const std::vector<Measurement>& measurements,
                                   Pollutant pollutant);

struct SearchSpace {
  int num_leaves_min = 1000;  // production-scale range; desk recipes override
  int num_leaves_max = 4095;
  int min_data_in_leaf_min = 5;
  int min_data_in_leaf_max = 200;
  double l2_lambda_min = 1e-3;  // log-uniform
  double l2_lambda_max = 100.0;
  double learning_rate_min = 0.02;  // log-uniform
  double learning_rate_max = 0.3;
  void validate() const;
};

gbdt::TrainConfig sample_config(const SearchSpace& space, const gbdt::TrainConfig& base,
                                Rng& rng);

struct Trial {
  gbdt::TrainConfig config;
  bool ok = false;
  double valid_mse_log = 0.0;
  std::string error;
};

struct SearchResult {
  size_t best_index = 0;
  std::vector<Trial> trials;
  const gbdt::TrainConfig& best_config() const { return trials[best_index].config; }
};

// Samples n_configs candidates, fits each on train, scores log-space MSE on
// valid; argmin with ties to the earlier trial. Failed trials are logged and
// excluded; all failing is an error.
SearchResult random_search(const TrainingTable& train, const TrainingTable& valid,
                           const SearchSpace& space, const gbdt::TrainConfig& base,
                           int n_configs, uint64_t seed, int workers = 1);

struct FitMetrics {
  std::optional<double> r2;  // original ug/m3 space
  double mse_log = 0.0;
};
FitMetrics score_model(const gbdt::Ensemble& model, const TrainingTable& rows,
                       int workers = 1);

struct FinalFitResult {
  gbdt::Ensemble model;
  FitMetrics test;
};

// Refit on train + valid; early stopping uses the chronologically last 10% of
// the combined rows so the test set never leaks into stopping decisions.
FinalFitResult final_fit(const gbdt::TrainConfig& config, const TrainingTable& train_valid,
                         const TrainingTable& test, int workers = 1);

struct LoovStationScore {
  std::string station_id;
  int fold = 0;
  std::optional<double> r2;  // absent when skipped
  bool skipped = false;
  std::string skip_reason;
};

struct LoovSummary {
  double max = 0.0, min = 0.0, mean = 0.0, median = 0.0;
  int n_scored = 0;
  int n_skipped = 0;
};
LoovSummary summarize_loov(const std::vector<LoovStationScore>& scores);

struct ExperimentOptions {
  SplitSpec split;
  SearchSpace space;
  gbdt::TrainConfig base;  // fixed fields (max_bin, patience, GOSS rates, caps)
  int n_configs = 40;
  uint64_t seed = 0;
  int workers = 1;
  bool run_loov = false;
  int loov_folds = 5;
  bool loov_research_per_fold = true;  // re-run the search inside each fold
  std::string subset = "All";
};

// Stations partitioned into k folds (sorted ids, round-robin); each fold runs
// the temporal protocol on the retained stations and scores every held-out
// station's complete series in original space.
std::vector<LoovStationScore> loov_experiment(const TrainingTable& table,
                                              const ExperimentOptions& options);

struct ExperimentReport {
  std::string pollutant;
  std::string subset_label;
  size_t n_columns = 0;
  uint64_t schema_hash = 0;
  gbdt::TrainConfig chosen;
  FitMetrics train, valid, test;
  std::vector<Trial> trials;
  // Final-model prediction error at each station's measured test-year peak.
  std::vector<PeakReport> peaks;
  std::optional<double> mean_peak_distance_pct;
  std::vector<LoovStationScore> loov_scores;
  std::optional<LoovSummary> loov_summary;

  void write(const std::string& dir, const std::string& prefix) const;
};

// Named presets from the subsetting experiments: Global (temporal +
// meteorology + remote sensing), Forecasting (road infrastructure + land use
// + meteorology + temporal) or All; otherwise a comma list of family names.
std::vector<FeatureFamily> resolve_family_selection(const std::string& selection);

// Full protocol on the (optionally subset) table: search, final fit, and the
// LOOV experiment when requested.
ExperimentReport run_experiment(const TrainingTable& table, const std::string& pollutant,
                                const ExperimentOptions& options);

struct Recipe {
  std::string world_dir;
  std::string out_prefix = "experiment";
  Pollutant pollutant = Pollutant::kNO2;
  std::string families = "All";
  ExperimentOptions options;
  Recipe();  // desk-scale defaults
};
Recipe load_recipe(const std::string& path);

}  // namespace airgrid
