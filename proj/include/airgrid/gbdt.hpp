#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "airgrid/rng.hpp"

namespace airgrid::gbdt {

// Targets are trained in log space: forward ln(y + eps), inverse
// max(exp(s) - eps, 0), so predictions can never go negative.
constexpr double kLogTransformEpsilon = 1e-7;
double log_transform(double y);
double inverse_transform(double s);

// Gains at or below this floor are treated as "no split"; in the heavy
// regularization limit every candidate gain collapses below it.
constexpr double kMinSplitGain = 1e-6;

struct TrainConfig {
  int num_leaves = 31;
  int min_data_in_leaf = 20;
  double l2_lambda = 1.0;
  double learning_rate = 0.1;
  int max_bin = 255;
  int early_stopping_rounds = 30;
  double goss_top_rate = 0.2;    // a: fraction kept by |gradient|
  double goss_other_rate = 0.1;  // b: fraction sampled from the rest
  bool use_goss = true;
  int max_trees = 400;
  uint64_t seed = 0;

  void validate() const;  // throws ValidationError
};

// Dense row-major matrix view.
struct DataView {
  const double* data = nullptr;
  size_t n_rows = 0;
  size_t n_cols = 0;
  std::span<const double> row(size_t i) const { return {data + i * n_cols, n_cols}; }
};

// Per-feature monotone quantile binning. Value bins are 0..num_bins-1; the
// index num_bins is reserved for missing (NaN) values.
class BinMapper {
 public:
  static BinMapper build(const DataView& data, int max_bin);

  int n_features() const { return static_cast<int>(bounds_.size()); }
  int num_bins(int f) const { return static_cast<int>(bounds_[f].size()); }
  uint8_t missing_bin(int f) const { return static_cast<uint8_t>(bounds_[f].size()); }
  uint8_t bin_of(int f, double x) const;
  const std::vector<double>& upper_bounds(int f) const { return bounds_[f]; }

  // Histogram layout: feature f occupies [offset(f), offset(f) + num_bins(f)]
  // where the final slot is the missing bin.
  int bin_offset(int f) const { return offsets_[f]; }
  int total_bins() const { return offsets_.empty() ? 0 : offsets_.back(); }

  bool operator==(const BinMapper&) const = default;

 private:
  friend class Ensemble;
  std::vector<std::vector<double>> bounds_;  // ascending upper bounds, last = +inf
  std::vector<int> offsets_;                 // n_features + 1 entries
};

struct BinnedMatrix {
  size_t n_rows = 0;
  int n_features = 0;
  std::vector<uint8_t> bins;  // row-major
  const uint8_t* row(size_t i) const { return bins.data() + i * n_features; }
};
BinnedMatrix bin_matrix(const BinMapper& mapper, const DataView& data);

// Gradient-based one-side sampling: all of the top ceil(a*n) rows by
// |gradient| with weight 1 plus ceil(b*n) uniform draws from the rest with
// compensating weight (1-a)/b. a = 1 returns the identity sample.
struct GossSample {
  std::vector<int32_t> rows;
  std::vector<double> weights;
};
GossSample goss_sample(std::span<const double> gradients, double top_rate,
                       double other_rate, Rng& rng);

struct TreeNode {
  int32_t feature = -1;       // -1 marks a leaf
  uint8_t bin_threshold = 0;  // bin <= threshold goes left
  bool default_left = false;  // routing for the missing bin
  int32_t left = -1;
  int32_t right = -1;
  double value = 0.0;  // leaf output in log space, before learning rate
  int32_t count = 0;   // training rows through this node
  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  std::vector<TreeNode> nodes;  // root at index 0

  int n_leaves() const;
  const TreeNode& leaf_for_binned(const uint8_t* row, const BinMapper& mapper) const;
  double predict_binned(const uint8_t* row, const BinMapper& mapper) const;
  double predict_raw(std::span<const double> x, const BinMapper& mapper) const;
};

// Histogram machinery, public so tests can drive split finding directly.
struct HistEntry {
  double sum_grad = 0.0;
  double sum_hess = 0.0;
  int32_t count = 0;
};

struct Histogram {
  std::vector<HistEntry> entries;  // laid out per BinMapper offsets
  double sum_grad = 0.0;
  double sum_hess = 0.0;
  int32_t count = 0;
};

// grad/hess are parallel to rows and already carry any sample weights.
Histogram build_histogram(const BinMapper& mapper, const BinnedMatrix& data,
                          std::span<const int32_t> rows, std::span<const double> grad,
                          std::span<const double> hess);
// sibling = parent - child, exact for counts.
Histogram subtract_histogram(const Histogram& parent, const Histogram& child);

struct SplitInfo {
  bool found = false;
  int feature = -1;
  int bin = 0;  // threshold: bin <= bin goes left
  double gain = 0.0;
  bool default_left = false;
};

// Maximizes G_L^2/(H_L+l) + G_R^2/(H_R+l) - G^2/(H+l) over features and bin
// thresholds, subject to min_data_in_leaf on both children. Missing-bin stats
// ride with the child holding the larger hessian mass. Ties resolve to the
// lowest feature index, then the lowest bin.
SplitInfo best_split(const Histogram& hist, const BinMapper& mapper, double l2_lambda,
                     int min_data_in_leaf);

// Leaf-wise growth: repeatedly split the frontier leaf with the largest gain
// until num_leaves is reached or no feasible split remains.
Tree grow_tree(const BinnedMatrix& data, const BinMapper& mapper,
               std::span<const int32_t> sample_rows, std::span<const double> sample_grad,
               std::span<const double> sample_hess, const TrainConfig& config);

struct BoostRecord {
  int iteration;  // trees built so far
  double train_mse_log;
  double valid_mse_log;
};

class Ensemble {
 public:
  double base_score = 0.0;  // mean of log-transformed training targets
  double learning_rate = 0.1;
  int best_iteration = 0;  // number of trees used at prediction time
  std::vector<Tree> trees;
  BinMapper mapper;
  uint64_t schema_hash = 0;
  std::vector<std::string> column_names;
  TrainConfig config;
  std::vector<BoostRecord> history;  // not serialized

  // ug/m3 output (inverse transform applied).
  double predict_row(std::span<const double> x) const;
  std::vector<double> predict(const DataView& rows, int workers = 1) const;
  // log-space score without the inverse transform.
  double score_row_log(std::span<const double> x) const;

  void save(const std::string& path) const;
  static Ensemble load(const std::string& path);
};

// Sequential boosting on squared error in log space. Callers pass raw ug/m3
// targets; the transform lives here. Early stopping watches validation MSE
// (log space) with the configured patience.
Ensemble fit(const DataView& train, std::span<const double> train_y, const DataView& valid,
             std::span<const double> valid_y, const std::vector<std::string>& column_names,
             const TrainConfig& config);

}  // namespace airgrid::gbdt
