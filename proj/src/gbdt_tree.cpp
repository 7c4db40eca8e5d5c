#include <algorithm>
#include <cmath>
#include <numeric>

#include "airgrid/errors.hpp"
#include "airgrid/gbdt.hpp"

namespace airgrid::gbdt {

int Tree::n_leaves() const {
  int n = 0;
  for (const TreeNode& node : nodes) n += node.is_leaf() ? 1 : 0;
  return n;
}

const TreeNode& Tree::leaf_for_binned(const uint8_t* row, const BinMapper& mapper) const {
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    const uint8_t b = row[node->feature];
    bool go_left;
    if (b == mapper.missing_bin(node->feature)) {
      go_left = node->default_left;
    } else {
      go_left = b <= node->bin_threshold;
    }
    node = &nodes[static_cast<size_t>(go_left ? node->left : node->right)];
  }
  return *node;
}

double Tree::predict_binned(const uint8_t* row, const BinMapper& mapper) const {
  return leaf_for_binned(row, mapper).value;
}

double Tree::predict_raw(std::span<const double> x, const BinMapper& mapper) const {
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    const uint8_t b = mapper.bin_of(node->feature, x[static_cast<size_t>(node->feature)]);
    bool go_left;
    if (b == mapper.missing_bin(node->feature)) {
      go_left = node->default_left;
    } else {
      go_left = b <= node->bin_threshold;
    }
    node = &nodes[static_cast<size_t>(go_left ? node->left : node->right)];
  }
  return node->value;
}

Histogram build_histogram(const BinMapper& mapper, const BinnedMatrix& data,
                          std::span<const int32_t> rows, std::span<const double> grad,
                          std::span<const double> hess) {
  Histogram h;
  h.entries.assign(static_cast<size_t>(mapper.total_bins()), HistEntry{});
  const int n_features = mapper.n_features();
  for (size_t i = 0; i < rows.size(); ++i) {
    const uint8_t* row = data.row(static_cast<size_t>(rows[i]));
    const double g = grad[i];
    const double hs = hess[i];
    for (int f = 0; f < n_features; ++f) {
      HistEntry& e = h.entries[static_cast<size_t>(mapper.bin_offset(f) + row[f])];
      e.sum_grad += g;
      e.sum_hess += hs;
      e.count += 1;
    }
    h.sum_grad += g;
    h.sum_hess += hs;
    h.count += 1;
  }
  return h;
}

Histogram subtract_histogram(const Histogram& parent, const Histogram& child) {
  Histogram out;
  out.entries.resize(parent.entries.size());
  for (size_t i = 0; i < parent.entries.size(); ++i) {
    out.entries[i].sum_grad = parent.entries[i].sum_grad - child.entries[i].sum_grad;
    out.entries[i].sum_hess = parent.entries[i].sum_hess - child.entries[i].sum_hess;
    out.entries[i].count = parent.entries[i].count - child.entries[i].count;
  }
  out.sum_grad = parent.sum_grad - child.sum_grad;
  out.sum_hess = parent.sum_hess - child.sum_hess;
  out.count = parent.count - child.count;
  return out;
}

namespace {

double leaf_objective(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? g * g / denom : 0.0;
}

}  // namespace

SplitInfo best_split(const Histogram& hist, const BinMapper& mapper, double l2_lambda,
                     int min_data_in_leaf) {
  SplitInfo best;
  const double parent_obj = leaf_objective(hist.sum_grad, hist.sum_hess, l2_lambda);

  for (int f = 0; f < mapper.n_features(); ++f) {
    const int nb = mapper.num_bins(f);
    if (nb < 2) continue;
    const int off = mapper.bin_offset(f);
    const HistEntry& missing = hist.entries[static_cast<size_t>(off + nb)];

    // Totals over value bins only; the missing bin rides with the side that
    // carries the larger hessian mass.
    double total_g = hist.sum_grad - missing.sum_grad;
    double total_h = hist.sum_hess - missing.sum_hess;
    int32_t total_c = hist.count - missing.count;

    double left_g = 0.0, left_h = 0.0;
    int32_t left_c = 0;
    for (int b = 0; b + 1 < nb; ++b) {
      const HistEntry& e = hist.entries[static_cast<size_t>(off + b)];
      left_g += e.sum_grad;
      left_h += e.sum_hess;
      left_c += e.count;
      double right_g = total_g - left_g;
      double right_h = total_h - left_h;
      int32_t right_c = total_c - left_c;

      double lg = left_g, lh = left_h, rg = right_g, rh = right_h;
      int32_t lc = left_c, rc = right_c;
      const bool default_left = left_h >= right_h;
      if (default_left) {
        lg += missing.sum_grad;
        lh += missing.sum_hess;
        lc += missing.count;
      } else {
        rg += missing.sum_grad;
        rh += missing.sum_hess;
        rc += missing.count;
      }
      if (lc < min_data_in_leaf || rc < min_data_in_leaf) continue;

      const double gain =
          leaf_objective(lg, lh, l2_lambda) + leaf_objective(rg, rh, l2_lambda) - parent_obj;
      if (gain > kMinSplitGain && gain > best.gain) {
        best.found = true;
        best.feature = f;
        best.bin = b;
        best.gain = gain;
        best.default_left = default_left;
      }
    }
  }
  return best;
}

namespace {

struct LeafState {
  int node_id;
  size_t begin, end;  // range in the order array
  Histogram hist;
  SplitInfo split;
};

}  // namespace

Tree grow_tree(const BinnedMatrix& data, const BinMapper& mapper,
               std::span<const int32_t> sample_rows, std::span<const double> sample_grad,
               std::span<const double> sample_hess, const TrainConfig& config) {
  const size_t n = sample_rows.size();
  if (n == 0) throw ValidationError("grow_tree: no samples");
  if (sample_grad.size() != n || sample_hess.size() != n)
    throw ValidationError("grow_tree: gradient arrays do not match sample rows");

  // order holds positions into the sample arrays; leaves own contiguous ranges.
  std::vector<int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  auto rows_of = [&](size_t begin, size_t end, std::vector<int32_t>& rows,
                     std::vector<double>& g, std::vector<double>& h) {
    rows.clear();
    g.clear();
    h.clear();
    rows.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
      const int32_t pos = order[i];
      rows.push_back(sample_rows[static_cast<size_t>(pos)]);
      g.push_back(sample_grad[static_cast<size_t>(pos)]);
      h.push_back(sample_hess[static_cast<size_t>(pos)]);
    }
  };

  Tree tree;
  std::vector<LeafState> leaves;
  std::vector<int32_t> scratch_rows;
  std::vector<double> scratch_g, scratch_h;

  // Frontier histograms are retained for the sibling-subtraction trick up to
  // a fixed pool size; beyond it they are dropped after split finding and the
  // children are rebuilt directly. Keeps wide trees (1000+ leaves) bounded.
  constexpr size_t kHistogramPoolCap = 128;
  size_t retained = 0;

  auto make_leaf = [&](size_t begin, size_t end, Histogram hist) {
    TreeNode node;
    node.value = -hist.sum_grad / (hist.sum_hess + config.l2_lambda);
    node.count = hist.count;
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);
    LeafState ls{id, begin, end, std::move(hist), SplitInfo{}};
    ls.split = best_split(ls.hist, mapper, config.l2_lambda, config.min_data_in_leaf);
    if (!ls.split.found || retained >= kHistogramPoolCap) {
      ls.hist.entries.clear();
      ls.hist.entries.shrink_to_fit();
    } else {
      ++retained;
    }
    leaves.push_back(std::move(ls));
  };

  rows_of(0, n, scratch_rows, scratch_g, scratch_h);
  make_leaf(0, n, build_histogram(mapper, data, scratch_rows, scratch_g, scratch_h));

  int n_leaves = 1;
  while (n_leaves < config.num_leaves) {
    // Frontier leaf with the largest feasible gain; ties to the lower node id.
    int pick = -1;
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (!leaves[i].split.found) continue;
      if (pick < 0 || leaves[i].split.gain > leaves[static_cast<size_t>(pick)].split.gain)
        pick = static_cast<int>(i);
    }
    if (pick < 0) break;

    LeafState leaf = std::move(leaves[static_cast<size_t>(pick)]);
    leaves.erase(leaves.begin() + pick);
    if (!leaf.hist.entries.empty()) --retained;
    const SplitInfo& sp = leaf.split;
    const uint8_t missing_bin = mapper.missing_bin(sp.feature);

    auto goes_left = [&](int32_t pos) {
      const uint8_t b = data.row(static_cast<size_t>(sample_rows[static_cast<size_t>(pos)]))
                            [sp.feature];
      if (b == missing_bin) return sp.default_left;
      return b <= static_cast<uint8_t>(sp.bin);
    };
    const auto mid_it = std::stable_partition(
        order.begin() + static_cast<ptrdiff_t>(leaf.begin),
        order.begin() + static_cast<ptrdiff_t>(leaf.end), goes_left);
    const size_t mid = static_cast<size_t>(mid_it - order.begin());

    // Histogram for the smaller child directly, sibling by subtraction when
    // the parent histogram is still in the pool.
    const size_t left_n = mid - leaf.begin;
    const size_t right_n = leaf.end - mid;
    Histogram left_hist, right_hist;
    const bool have_parent = !leaf.hist.entries.empty();
    if (left_n <= right_n) {
      rows_of(leaf.begin, mid, scratch_rows, scratch_g, scratch_h);
      left_hist = build_histogram(mapper, data, scratch_rows, scratch_g, scratch_h);
      if (have_parent) {
        right_hist = subtract_histogram(leaf.hist, left_hist);
      } else {
        rows_of(mid, leaf.end, scratch_rows, scratch_g, scratch_h);
        right_hist = build_histogram(mapper, data, scratch_rows, scratch_g, scratch_h);
      }
    } else {
      rows_of(mid, leaf.end, scratch_rows, scratch_g, scratch_h);
      right_hist = build_histogram(mapper, data, scratch_rows, scratch_g, scratch_h);
      if (have_parent) {
        left_hist = subtract_histogram(leaf.hist, right_hist);
      } else {
        rows_of(leaf.begin, mid, scratch_rows, scratch_g, scratch_h);
        left_hist = build_histogram(mapper, data, scratch_rows, scratch_g, scratch_h);
      }
    }

    const int32_t left_id = static_cast<int32_t>(tree.nodes.size());
    {
      TreeNode& parent = tree.nodes[static_cast<size_t>(leaf.node_id)];
      parent.feature = sp.feature;
      parent.bin_threshold = static_cast<uint8_t>(sp.bin);
      parent.default_left = sp.default_left;
      parent.left = left_id;
      parent.right = left_id + 1;
    }
    make_leaf(leaf.begin, mid, std::move(left_hist));
    make_leaf(mid, leaf.end, std::move(right_hist));
    ++n_leaves;
  }
  return tree;
}

}  // namespace airgrid::gbdt
