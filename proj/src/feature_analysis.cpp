#include "airgrid/feature_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>

#include "airgrid/errors.hpp"

namespace airgrid {

namespace {

// Mid-ranks: 1-based, ties receive the average of the ranks they span.
std::vector<double> mid_ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson_opt(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da <= 0.0 || db <= 0.0) return std::nullopt;  // constant series
  return num / std::sqrt(da * db);
}

bool is_constant(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] != v[0] && !(std::isnan(v[i]) && std::isnan(v[0]))) return false;
  return true;
}

std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& v,
                                      int* excluded = nullptr) {
  double sum = 0.0;
  int n = 0, skipped = 0;
  for (const auto& x : v) {
    if (x) {
      sum += *x;
      ++n;
    } else {
      ++skipped;
    }
  }
  if (excluded) *excluded = skipped;
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
  std::vector<double> xs, ys;
  xs.reserve(x.size());
  ys.reserve(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;  // pairwise deletion
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  if (xs.size() < 2) throw ValidationError("spearman: fewer than 2 complete pairs");
  return pearson_opt(mid_ranks(xs), mid_ranks(ys));
}

CorrelationReport correlation_report(const std::vector<StationSeries>& stations) {
  if (stations.empty()) throw ValidationError("correlation_report: no stations");
  CorrelationReport report;
  const FeatureSchema& schema = stations.front().features.schema;
  for (const auto& c : schema.columns()) report.feature_names.push_back(c.name);
  const size_t n_features = schema.size();

  for (const StationSeries& st : stations) {
    if (st.features.schema.size() != n_features)
      throw ValidationError("correlation_report: station schemas differ");
    if (st.targets.size() != st.features.n_rows())
      throw ValidationError("correlation_report: target length mismatch for station " +
                            st.station_id);
    if (st.features.n_rows() < 2)
      throw ValidationError("correlation_report: station " + st.station_id +
                            " has fewer than 2 observations");
    StationCorrelation sc;
    sc.station_id = st.station_id;
    sc.environment_class = st.environment_class;
    sc.rho.resize(n_features);
    std::vector<double> col(st.features.n_rows());
    for (size_t f = 0; f < n_features; ++f) {
      for (size_t r = 0; r < st.features.n_rows(); ++r) col[r] = st.features.row(r)[f];
      sc.rho[f] = spearman(col, st.targets);
    }
    report.stations.push_back(std::move(sc));
  }

  report.overall_mean.resize(n_features);
  report.undefined_counts.resize(n_features, 0);
  report.class_mean.assign(6, std::vector<std::optional<double>>(n_features));
  std::vector<std::optional<double>> scratch;
  for (size_t f = 0; f < n_features; ++f) {
    scratch.clear();
    for (const auto& st : report.stations) scratch.push_back(st.rho[f]);
    report.overall_mean[f] = mean_of_defined(scratch, &report.undefined_counts[f]);
    for (int cls = 0; cls < 6; ++cls) {
      scratch.clear();
      for (const auto& st : report.stations)
        if (static_cast<int>(st.environment_class) == cls) scratch.push_back(st.rho[f]);
      report.class_mean[static_cast<size_t>(cls)][f] =
          scratch.empty() ? std::nullopt : mean_of_defined(scratch);
    }
  }
  return report;
}

namespace {

std::vector<size_t> top_by(const std::vector<std::optional<double>>& means, size_t k,
                           bool positive) {
  std::vector<size_t> idx;
  for (size_t i = 0; i < means.size(); ++i)
    if (means[i]) idx.push_back(i);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (*means[a] != *means[b]) return positive ? *means[a] > *means[b] : *means[a] < *means[b];
    return a < b;
  });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

}  // namespace

std::vector<size_t> CorrelationReport::top_positive(size_t k) const {
  return top_by(overall_mean, k, true);
}

std::vector<size_t> CorrelationReport::top_negative(size_t k) const {
  return top_by(overall_mean, k, false);
}

void CorrelationReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "feature,overall_mean_rho,n_undefined";
  for (int cls = 0; cls < 6; ++cls)
    out << ',' << to_string(static_cast<EnvironmentClass>(cls));
  out << '\n';
  char buf[32];
  auto emit = [&](const std::optional<double>& v) {
    if (v) {
      std::snprintf(buf, sizeof buf, "%.6f", *v);
      out << buf;
    }  // empty field for undefined
  };
  for (size_t f = 0; f < feature_names.size(); ++f) {
    out << feature_names[f] << ',';
    emit(overall_mean[f]);
    out << ',' << undefined_counts[f];
    for (int cls = 0; cls < 6; ++cls) {
      out << ',';
      emit(class_mean[static_cast<size_t>(cls)][f]);
    }
    out << '\n';
  }
}

DissimilarityMatrix feature_dissimilarity(const FeatureMatrix& m) {
  const size_t n = m.schema.size();
  if (n < 2) throw ValidationError("feature_dissimilarity: need at least 2 columns");
  DissimilarityMatrix out;
  out.n = n;
  out.d.assign(n * n, 0.0);
  out.undefined_col.assign(n, false);

  std::vector<std::vector<double>> cols(n, std::vector<double>(m.n_rows()));
  bool any_nan = false;
  for (size_t r = 0; r < m.n_rows(); ++r) {
    const auto row = m.row(r);
    for (size_t f = 0; f < n; ++f) {
      cols[f][r] = row[f];
      any_nan = any_nan || std::isnan(row[f]);
    }
  }

  // Complete matrices rank each column once; Pearson over shared ranks is then
  // identical to per-pair Spearman but without the per-pair sorts.
  std::vector<std::vector<double>> ranks;
  if (!any_nan) {
    ranks.reserve(n);
    for (size_t f = 0; f < n; ++f) ranks.push_back(mid_ranks(cols[f]));
  }

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const auto rho = any_nan ? spearman(cols[i], cols[j]) : pearson_opt(ranks[i], ranks[j]);
      double d;
      if (rho) {
        d = 1.0 - *rho;
      } else {
        d = 2.0;  // constant column: treat as maximally dissimilar and flag
        if (is_constant(cols[i])) out.undefined_col[i] = true;
        if (is_constant(cols[j])) out.undefined_col[j] = true;
      }
      out.d[i * n + j] = d;
      out.d[j * n + i] = d;
    }
  }
  return out;
}

FeatureDendrogram hierarchical_cluster(const DissimilarityMatrix& matrix) {
  const size_t n = matrix.n;
  FeatureDendrogram dendro;
  dendro.n_leaves = n;
  if (n < 2) return dendro;

  struct Cluster {
    int node;
    int size;
    bool alive;
  };
  std::vector<Cluster> clusters(n);
  for (size_t i = 0; i < n; ++i)
    clusters[i] = {static_cast<int>(i), 1, true};
  std::vector<double> d = matrix.d;  // working average-linkage distances

  for (size_t step = 0; step + 1 < n; ++step) {
    size_t best_i = 0, best_j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
      if (!clusters[i].alive) continue;
      for (size_t j = i + 1; j < n; ++j) {
        if (!clusters[j].alive) continue;
        if (d[i * n + j] < best) {
          best = d[i * n + j];
          best_i = i;
          best_j = j;
        }
      }
    }
    const int size_i = clusters[best_i].size;
    const int size_j = clusters[best_j].size;
    dendro.merges.push_back({clusters[best_i].node, clusters[best_j].node, best,
                             size_i + size_j});
    // UPGMA update: weighted mean of member distances.
    for (size_t k = 0; k < n; ++k) {
      if (!clusters[k].alive || k == best_i || k == best_j) continue;
      const double dk = (size_i * d[best_i * n + k] + size_j * d[best_j * n + k]) /
                        static_cast<double>(size_i + size_j);
      d[best_i * n + k] = dk;
      d[k * n + best_i] = dk;
    }
    clusters[best_i].node = static_cast<int>(n + step);
    clusters[best_i].size = size_i + size_j;
    clusters[best_j].alive = false;
  }
  return dendro;
}

std::vector<int> FeatureDendrogram::clusters_at(double threshold) const {
  const size_t n = n_leaves;
  std::vector<int> parent(n + merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (size_t s = 0; s < merges.size(); ++s) {
    if (merges[s].distance > threshold) continue;  // cut here
    const int node = static_cast<int>(n + s);
    parent[static_cast<size_t>(find(merges[s].node_a))] = node;
    parent[static_cast<size_t>(find(merges[s].node_b))] = node;
  }
  std::vector<int> labels(n);
  std::map<int, int> relabel;
  for (size_t i = 0; i < n; ++i) {
    const int root = find(static_cast<int>(i));
    const auto it = relabel.find(root);
    if (it == relabel.end()) {
      const int next = static_cast<int>(relabel.size());
      relabel.emplace(root, next);
      labels[i] = next;
    } else {
      labels[i] = it->second;
    }
  }
  return labels;
}

int FeatureDendrogram::cluster_count(double threshold) const {
  if (n_leaves == 0) return 0;
  const auto labels = clusters_at(threshold);
  return 1 + *std::max_element(labels.begin(), labels.end());
}

void FeatureDendrogram::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "step,node_a,node_b,distance\n";
  char buf[32];
  for (size_t s = 0; s < merges.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.9g", merges[s].distance);
    out << s << ',' << merges[s].node_a << ',' << merges[s].node_b << ',' << buf << '\n';
  }
}

}  // namespace airgrid
