#include <algorithm>
#include <cmath>

#include "airgrid/errors.hpp"
#include "airgrid/gbdt.hpp"

namespace airgrid::gbdt {

double log_transform(double y) {
  if (y < 0.0) throw ValidationError("log_transform: negative target");
  return std::log(y + kLogTransformEpsilon);
}

double inverse_transform(double s) {
  return std::max(std::exp(s) - kLogTransformEpsilon, 0.0);
}

void TrainConfig::validate() const {
  if (num_leaves < 2) throw ValidationError("num_leaves must be >= 2");
  if (min_data_in_leaf < 1) throw ValidationError("min_data_in_leaf must be >= 1");
  if (l2_lambda < 0.0) throw ValidationError("l2_lambda must be >= 0");
  if (learning_rate <= 0.0) throw ValidationError("learning_rate must be > 0");
  if (max_bin < 2 || max_bin > 255) throw ValidationError("max_bin must be in [2, 255]");
  if (early_stopping_rounds < 1) throw ValidationError("early_stopping_rounds must be >= 1");
  if (goss_top_rate <= 0.0 || goss_top_rate > 1.0)
    throw ValidationError("goss_top_rate must be in (0, 1]");
  if (goss_other_rate < 0.0 || goss_other_rate > 1.0 - goss_top_rate)
    throw ValidationError("goss_other_rate must be in [0, 1 - goss_top_rate]");
  if (max_trees < 1) throw ValidationError("max_trees must be >= 1");
}

BinMapper BinMapper::build(const DataView& data, int max_bin) {
  if (data.n_rows == 0) throw ValidationError("BinMapper: empty matrix");
  if (max_bin < 2 || max_bin > 255) throw ValidationError("max_bin must be in [2, 255]");

  BinMapper m;
  m.bounds_.resize(data.n_cols);
  std::vector<double> col;
  col.reserve(data.n_rows);
  for (size_t f = 0; f < data.n_cols; ++f) {
    col.clear();
    for (size_t r = 0; r < data.n_rows; ++r) {
      const double v = data.data[r * data.n_cols + f];
      if (!std::isnan(v)) col.push_back(v);
    }
    auto& bounds = m.bounds_[f];
    if (col.empty()) {  // all missing: single catch-all value bin
      bounds = {std::numeric_limits<double>::infinity()};
      continue;
    }
    std::sort(col.begin(), col.end());
    std::vector<double> distinct;
    distinct.reserve(col.size());
    for (double v : col)
      if (distinct.empty() || v != distinct.back()) distinct.push_back(v);

    if (distinct.size() <= static_cast<size_t>(max_bin)) {
      // One bin per distinct value, boundaries at midpoints.
      for (size_t i = 0; i + 1 < distinct.size(); ++i)
        bounds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
      bounds.push_back(std::numeric_limits<double>::infinity());
    } else {
      // Equal-frequency cuts over the sorted (with duplicates) column.
      const size_t n = col.size();
      for (int k = 1; k < max_bin; ++k) {
        const size_t pos = n * static_cast<size_t>(k) / static_cast<size_t>(max_bin);
        if (pos == 0 || pos >= n) continue;
        if (col[pos - 1] == col[pos]) continue;  // cannot separate equal values
        const double cut = 0.5 * (col[pos - 1] + col[pos]);
        if (bounds.empty() || cut > bounds.back()) bounds.push_back(cut);
      }
      bounds.push_back(std::numeric_limits<double>::infinity());
    }
  }
  m.offsets_.resize(data.n_cols + 1);
  m.offsets_[0] = 0;
  for (size_t f = 0; f < data.n_cols; ++f)
    m.offsets_[f + 1] = m.offsets_[f] + static_cast<int>(m.bounds_[f].size()) + 1;
  return m;
}

uint8_t BinMapper::bin_of(int f, double x) const {
  const auto& bounds = bounds_[f];
  if (std::isnan(x)) return missing_bin(f);
  const auto it = std::lower_bound(bounds.begin(), bounds.end(), x);
  if (it == bounds.end()) return static_cast<uint8_t>(bounds.size() - 1);
  return static_cast<uint8_t>(it - bounds.begin());
}

BinnedMatrix bin_matrix(const BinMapper& mapper, const DataView& data) {
  if (static_cast<int>(data.n_cols) != mapper.n_features())
    throw ValidationError("bin_matrix: column count does not match mapper");
  BinnedMatrix out;
  out.n_rows = data.n_rows;
  out.n_features = mapper.n_features();
  out.bins.resize(data.n_rows * data.n_cols);
  for (size_t r = 0; r < data.n_rows; ++r)
    for (size_t f = 0; f < data.n_cols; ++f)
      out.bins[r * data.n_cols + f] =
          mapper.bin_of(static_cast<int>(f), data.data[r * data.n_cols + f]);
  return out;
}

GossSample goss_sample(std::span<const double> gradients, double top_rate,
                       double other_rate, Rng& rng) {
  const size_t n = gradients.size();
  GossSample s;
  if (top_rate <= 0.0 || top_rate > 1.0)
    throw ValidationError("goss_sample: top_rate must be in (0, 1]");
  if (other_rate < 0.0 || other_rate > 1.0 - top_rate)
    throw ValidationError("goss_sample: other_rate must be in [0, 1 - top_rate]");
  if (n == 0) return s;

  if (top_rate >= 1.0) {  // degenerate GOSS: full-gradient boosting
    s.rows.resize(n);
    for (size_t i = 0; i < n; ++i) s.rows[i] = static_cast<int32_t>(i);
    s.weights.assign(n, 1.0);
    return s;
  }

  const size_t n_top =
      std::min(n, static_cast<size_t>(std::ceil(top_rate * static_cast<double>(n))));
  std::vector<int32_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<int32_t>(i);
  // |gradient| descending; equal gradients resolve by row index.
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    const double ga = std::fabs(gradients[static_cast<size_t>(a)]);
    const double gb = std::fabs(gradients[static_cast<size_t>(b)]);
    if (ga != gb) return ga > gb;
    return a < b;
  });

  s.rows.assign(order.begin(), order.begin() + static_cast<ptrdiff_t>(n_top));
  s.weights.assign(n_top, 1.0);

  const size_t n_rest = n - n_top;
  size_t n_other = static_cast<size_t>(std::ceil(other_rate * static_cast<double>(n)));
  n_other = std::min(n_other, n_rest);
  if (n_other > 0) {
    // Partial Fisher-Yates over the small-gradient tail.
    std::vector<int32_t> rest(order.begin() + static_cast<ptrdiff_t>(n_top), order.end());
    const double w = (1.0 - top_rate) / other_rate;
    for (size_t i = 0; i < n_other; ++i) {
      const size_t j = i + static_cast<size_t>(rng.uniform_u64(rest.size() - i));
      std::swap(rest[i], rest[j]);
      s.rows.push_back(rest[i]);
      s.weights.push_back(w);
    }
  }
  return s;
}

}  // namespace airgrid::gbdt
