#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airgrid/feature_matrix.hpp"

namespace airgrid {

// Spearman rank correlation: Pearson of mid-ranks (ties get average ranks).
// Pairs with a NaN on either side are dropped; nullopt when either ranked
// series is constant. Throws when fewer than 2 pairs survive.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct StationCorrelation {
  std::string station_id;
  EnvironmentClass environment_class;
  std::vector<std::optional<double>> rho;  // per feature column
};

struct CorrelationReport {
  std::vector<std::string> feature_names;
  std::vector<StationCorrelation> stations;
  std::vector<std::optional<double>> overall_mean;  // per feature
  // Mean per environment class, indexed [class][feature].
  std::vector<std::vector<std::optional<double>>> class_mean;
  std::vector<int> undefined_counts;  // stations excluded per feature

  // Feature indices of the k largest/smallest defined overall means.
  std::vector<size_t> top_positive(size_t k) const;
  std::vector<size_t> top_negative(size_t k) const;

  void write_csv(const std::string& path) const;
};

struct StationSeries {
  std::string station_id;
  EnvironmentClass environment_class;
  FeatureMatrix features;        // rows at the station's cell
  std::vector<double> targets;   // parallel to feature rows
};

CorrelationReport correlation_report(const std::vector<StationSeries>& stations);

struct DissimilarityMatrix {
  size_t n = 0;
  std::vector<double> d;            // row-major n x n, d = 1 - rho in [0, 2]
  std::vector<bool> undefined_col;  // column had no defined correlation at all
  double at(size_t i, size_t j) const { return d[i * n + j]; }
};

// d(i,j) = 1 - spearman(col_i, col_j); an undefined pair gets the maximum
// distance 2 and both columns are flagged.
DissimilarityMatrix feature_dissimilarity(const FeatureMatrix& m);

struct MergeStep {
  int node_a;       // scipy convention: leaves 0..n-1, step s creates node n+s
  int node_b;
  double distance;  // average linkage
  int size;         // members in the merged cluster
};

struct FeatureDendrogram {
  size_t n_leaves = 0;
  std::vector<MergeStep> merges;  // non-decreasing distance

  // Cluster labels (0-based, in order of first appearance) after applying all
  // merges with distance <= threshold.
  std::vector<int> clusters_at(double threshold) const;
  int cluster_count(double threshold) const;
  void write_csv(const std::string& path) const;
};

// Agglomerative clustering with average linkage (UPGMA) over a symmetric
// dissimilarity matrix.
FeatureDendrogram hierarchical_cluster(const DissimilarityMatrix& matrix);

}  // namespace airgrid
