#include <cmath>
#include <numeric>

#include "airgrid/errors.hpp"
#include "airgrid/gbdt.hpp"
#include "airgrid/worker_pool.hpp"

namespace airgrid::gbdt {

double Ensemble::score_row_log(std::span<const double> x) const {
  double s = base_score;
  for (int t = 0; t < best_iteration; ++t)
    s += learning_rate * trees[static_cast<size_t>(t)].predict_raw(x, mapper);
  return s;
}

double Ensemble::predict_row(std::span<const double> x) const {
  return inverse_transform(score_row_log(x));
}

std::vector<double> Ensemble::predict(const DataView& rows, int workers) const {
  if (rows.n_cols != column_names.size())
    throw ValidationError("predict: row width " + std::to_string(rows.n_cols) +
                          " does not match model schema (" +
                          std::to_string(column_names.size()) + " columns)");
  std::vector<double> out(rows.n_rows);
  run_blocks(rows.n_rows, 4096, workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) out[i] = predict_row(rows.row(i));
  });
  return out;
}

namespace {

double mse(std::span<const double> scores, std::span<const double> targets) {
  double acc = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double d = scores[i] - targets[i];
    acc += d * d;
  }
  return acc / static_cast<double>(scores.size());
}

}  // namespace

Ensemble fit(const DataView& train, std::span<const double> train_y, const DataView& valid,
             std::span<const double> valid_y, const std::vector<std::string>& column_names,
             const TrainConfig& config) {
  config.validate();
  if (train.n_rows == 0) throw ValidationError("fit: empty training set");
  if (valid.n_rows == 0) throw ValidationError("fit: empty validation set");
  if (train.n_cols != valid.n_cols || train.n_cols != column_names.size())
    throw ValidationError("fit: train/valid/schema column counts disagree");
  if (train_y.size() != train.n_rows || valid_y.size() != valid.n_rows)
    throw ValidationError("fit: target length does not match rows");
  for (size_t i = 0; i < train.n_rows * train.n_cols; ++i)
    if (!std::isfinite(train.data[i]) && !std::isnan(train.data[i]))
      throw ValidationError("fit: non-finite feature value in training set");
  for (size_t i = 0; i < valid.n_rows * valid.n_cols; ++i)
    if (!std::isfinite(valid.data[i]) && !std::isnan(valid.data[i]))
      throw ValidationError("fit: non-finite feature value in validation set");

  Ensemble model;
  model.learning_rate = config.learning_rate;
  model.column_names = column_names;
  model.config = config;
  model.mapper = BinMapper::build(train, config.max_bin);
  const BinnedMatrix binned_train = bin_matrix(model.mapper, train);
  const BinnedMatrix binned_valid = bin_matrix(model.mapper, valid);

  std::vector<double> ylog_train(train.n_rows), ylog_valid(valid.n_rows);
  for (size_t i = 0; i < train.n_rows; ++i) ylog_train[i] = log_transform(train_y[i]);
  for (size_t i = 0; i < valid.n_rows; ++i) ylog_valid[i] = log_transform(valid_y[i]);

  model.base_score =
      std::accumulate(ylog_train.begin(), ylog_train.end(), 0.0) /
      static_cast<double>(train.n_rows);

  std::vector<double> score_train(train.n_rows, model.base_score);
  std::vector<double> score_valid(valid.n_rows, model.base_score);
  std::vector<double> grad(train.n_rows);
  const std::vector<double> unit_hess(train.n_rows, 1.0);  // squared error

  double best_valid = mse(score_valid, ylog_valid);
  model.best_iteration = 0;
  Rng rng(config.seed);

  const bool sampling = config.use_goss && config.goss_top_rate < 1.0;
  for (int iter = 0; iter < config.max_trees; ++iter) {
    for (size_t i = 0; i < train.n_rows; ++i) grad[i] = score_train[i] - ylog_train[i];

    GossSample sample;
    if (sampling) {
      sample = goss_sample(grad, config.goss_top_rate, config.goss_other_rate, rng);
    } else {
      sample.rows.resize(train.n_rows);
      std::iota(sample.rows.begin(), sample.rows.end(), 0);
      sample.weights.assign(train.n_rows, 1.0);
    }
    std::vector<double> g_w(sample.rows.size()), h_w(sample.rows.size());
    for (size_t i = 0; i < sample.rows.size(); ++i) {
      g_w[i] = grad[static_cast<size_t>(sample.rows[i])] * sample.weights[i];
      h_w[i] = sample.weights[i];
    }

    Tree tree = grow_tree(binned_train, model.mapper, sample.rows, g_w, h_w, config);
    for (size_t i = 0; i < train.n_rows; ++i)
      score_train[i] += config.learning_rate * tree.predict_binned(binned_train.row(i),
                                                                   model.mapper);
    for (size_t i = 0; i < valid.n_rows; ++i)
      score_valid[i] += config.learning_rate * tree.predict_binned(binned_valid.row(i),
                                                                   model.mapper);
    model.trees.push_back(std::move(tree));

    const double train_mse = mse(score_train, ylog_train);
    const double valid_mse = mse(score_valid, ylog_valid);
    model.history.push_back({iter + 1, train_mse, valid_mse});
    if (valid_mse < best_valid) {
      best_valid = valid_mse;
      model.best_iteration = iter + 1;
    }
    if (iter + 1 - model.best_iteration >= config.early_stopping_rounds) break;
  }
  return model;
}

}  // namespace airgrid::gbdt
