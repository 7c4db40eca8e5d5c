#include "airgrid/train.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "airgrid/csv.hpp"
#include "airgrid/errors.hpp"
#include "airgrid/eval.hpp"
#include "airgrid/worker_pool.hpp"

namespace airgrid {

void SplitSpec::validate() const {
  if (train_years.empty() || validation_years.empty() || test_years.empty())
    throw ValidationError("split spec: all three year sets must be non-empty");
  for (int y : validation_years)
    if (train_years.count(y)) throw ValidationError("split spec: year sets overlap");
  for (int y : test_years)
    if (train_years.count(y) || validation_years.count(y))
      throw ValidationError("split spec: year sets overlap");
}

SplitIndices temporal_split(std::span<const UtcHour> timestamps, const SplitSpec& spec) {
  spec.validate();
  SplitIndices out;
  for (size_t i = 0; i < timestamps.size(); ++i) {
    const int y = year_of(timestamps[i]);
    if (spec.train_years.count(y)) out.train.push_back(i);
    else if (spec.validation_years.count(y)) out.valid.push_back(i);
    else if (spec.test_years.count(y)) out.test.push_back(i);
  }
  if (out.train.empty()) throw ValidationError("temporal_split: empty training split");
  if (out.valid.empty()) throw ValidationError("temporal_split: empty validation split");
  if (out.test.empty()) throw ValidationError("temporal_split: empty test split");
  return out;
}

TrainingTable TrainingTable::select(std::span<const size_t> indices) const {
  TrainingTable out;
  out.X.schema = X.schema;
  const size_t w = X.schema.size();
  out.X.keys.reserve(indices.size());
  out.X.values.reserve(indices.size() * w);
  out.y.reserve(indices.size());
  out.station_ids.reserve(indices.size());
  out.timestamps.reserve(indices.size());
  for (size_t i : indices) {
    out.X.keys.push_back(X.keys[i]);
    const auto row = X.row(i);
    out.X.values.insert(out.X.values.end(), row.begin(), row.end());
    out.y.push_back(y[i]);
    out.station_ids.push_back(station_ids[i]);
    out.timestamps.push_back(timestamps[i]);
  }
  return out;
}

TrainingTable TrainingTable::restrict_to(const std::vector<FeatureFamily>& families) const {
  TrainingTable out;
  out.X = X.restrict_to(families);
  out.y = y;
  out.station_ids = station_ids;
  out.timestamps = timestamps;
  return out;
}

std::vector<std::string> TrainingTable::column_names() const {
  std::vector<std::string> names;
  names.reserve(X.schema.size());
  for (const auto& c : X.schema.columns()) names.push_back(c.name);
  return names;
}

TrainingTable build_training_table(const FeatureStore& store,
                                   const std::vector<StationSite>& stations,
                                   const std::vector<Measurement>& measurements,
                                   Pollutant pollutant) {
  std::map<std::string, CellId> cell_by_station;
  for (const StationSite& s : stations) cell_by_station[s.station_id] = s.snapped_cell;

  // Deterministic row order: station id, then time, then input order.
  std::vector<const Measurement*> rows;
  for (const Measurement& m : measurements) {
    if (m.pollutant != pollutant) continue;
    if (m.value < 0.0)
      throw ValidationError("build_training_table: negative measurement; run "
                            "clean_measurements first");
    if (!cell_by_station.count(m.station_id))
      throw ValidationError("measurement references unknown station '" + m.station_id + "'");
    rows.push_back(&m);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Measurement* a, const Measurement* b) {
    if (a->station_id != b->station_id) return a->station_id < b->station_id;
    return a->timestamp < b->timestamp;
  });

  std::vector<std::pair<CellId, UtcHour>> keys;
  keys.reserve(rows.size());
  for (const Measurement* m : rows)
    keys.emplace_back(cell_by_station.at(m->station_id), m->timestamp);

  TrainingTable table;
  table.X = store.assemble_pairs(keys);
  table.y.reserve(rows.size());
  table.station_ids.reserve(rows.size());
  table.timestamps.reserve(rows.size());
  for (const Measurement* m : rows) {
    table.y.push_back(m->value);
    table.station_ids.push_back(m->station_id);
    table.timestamps.push_back(m->timestamp);
  }
  return table;
}

void SearchSpace::validate() const {
  if (num_leaves_min < 2 || num_leaves_max < num_leaves_min)
    throw ValidationError("search space: bad num_leaves range");
  if (min_data_in_leaf_min < 1 || min_data_in_leaf_max < min_data_in_leaf_min)
    throw ValidationError("search space: bad min_data_in_leaf range");
  if (l2_lambda_min <= 0.0 || l2_lambda_max < l2_lambda_min)
    throw ValidationError("search space: bad l2_lambda range");
  if (learning_rate_min <= 0.0 || learning_rate_max < learning_rate_min)
    throw ValidationError("search space: bad learning_rate range");
}

gbdt::TrainConfig sample_config(const SearchSpace& space, const gbdt::TrainConfig& base,
                                Rng& rng) {
  gbdt::TrainConfig c = base;
  c.num_leaves = static_cast<int>(rng.uniform_int(space.num_leaves_min, space.num_leaves_max));
  c.min_data_in_leaf = static_cast<int>(
      rng.uniform_int(space.min_data_in_leaf_min, space.min_data_in_leaf_max));
  c.l2_lambda = rng.log_uniform(space.l2_lambda_min, space.l2_lambda_max);
  c.learning_rate = rng.log_uniform(space.learning_rate_min, space.learning_rate_max);
  return c;
}

namespace {

double mse_log_of(const gbdt::Ensemble& model, const TrainingTable& rows, int workers) {
  std::vector<double> se(rows.n_rows());
  const auto view = rows.view();
  run_blocks(rows.n_rows(), 4096, workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const double d = model.score_row_log(view.row(i)) - gbdt::log_transform(rows.y[i]);
      se[i] = d * d;
    }
  });
  return std::accumulate(se.begin(), se.end(), 0.0) / static_cast<double>(se.size());
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  Rng r(seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x5851f42d4c957f2dULL));
  return r.next_u64();
}

}  // namespace

SearchResult random_search(const TrainingTable& train, const TrainingTable& valid,
                           const SearchSpace& space, const gbdt::TrainConfig& base,
                           int n_configs, uint64_t seed, int workers) {
  if (n_configs < 1) throw ValidationError("random_search: n_configs must be >= 1");
  space.validate();
  SearchResult result;
  result.trials.resize(static_cast<size_t>(n_configs));
  Rng rng(seed);
  for (auto& t : result.trials) {
    t.config = sample_config(space, base, rng);
    t.config.seed = rng.next_u64();
  }

  const auto names = train.column_names();
  run_jobs(static_cast<size_t>(n_configs), workers, [&](size_t i) {
    Trial& t = result.trials[i];
    try {
      const gbdt::Ensemble model =
          gbdt::fit(train.view(), train.y, valid.view(), valid.y, names, t.config);
      t.valid_mse_log = mse_log_of(model, valid, 1);
      t.ok = true;
    } catch (const std::exception& e) {
      t.ok = false;
      t.error = e.what();
    }
  });

  bool any = false;
  for (size_t i = 0; i < result.trials.size(); ++i) {
    const Trial& t = result.trials[i];
    if (!t.ok) continue;
    // strict < keeps the earliest trial on ties
    if (!any || t.valid_mse_log < result.trials[result.best_index].valid_mse_log) {
      result.best_index = i;
      any = true;
    }
  }
  if (!any) throw ValidationError("random_search: every trial failed; first error: " +
                                  result.trials[0].error);
  return result;
}

FitMetrics score_model(const gbdt::Ensemble& model, const TrainingTable& rows,
                       int workers) {
  FitMetrics m;
  const std::vector<double> pred = model.predict(rows.view(), workers);
  m.r2 = r_squared(pred, rows.y);
  m.mse_log = mse_log_of(model, rows, workers);
  return m;
}

FinalFitResult final_fit(const gbdt::TrainConfig& config, const TrainingTable& train_valid,
                         const TrainingTable& test, int workers) {
  if (test.n_rows() == 0) throw ValidationError("final_fit: empty test set");
  if (train_valid.n_rows() < 2) throw ValidationError("final_fit: not enough rows");

  // Stopping holdout: the chronologically last 10% of train+valid rows.
  std::vector<size_t> order(train_valid.n_rows());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return train_valid.timestamps[a] < train_valid.timestamps[b];
  });
  size_t n_stop = std::max<size_t>(1, train_valid.n_rows() / 10);
  if (n_stop >= train_valid.n_rows()) n_stop = train_valid.n_rows() - 1;
  const std::vector<size_t> fit_idx(order.begin(),
                                    order.end() - static_cast<ptrdiff_t>(n_stop));
  const std::vector<size_t> stop_idx(order.end() - static_cast<ptrdiff_t>(n_stop),
                                     order.end());
  const TrainingTable fit_rows = train_valid.select(fit_idx);
  const TrainingTable stop_rows = train_valid.select(stop_idx);

  FinalFitResult out;
  out.model = gbdt::fit(fit_rows.view(), fit_rows.y, stop_rows.view(), stop_rows.y,
                        train_valid.column_names(), config);
  out.test = score_model(out.model, test, workers);
  return out;
}

LoovSummary summarize_loov(const std::vector<LoovStationScore>& scores) {
  LoovSummary s;
  std::vector<double> r2s;
  for (const auto& sc : scores) {
    if (sc.r2) r2s.push_back(*sc.r2);
    else ++s.n_skipped;
  }
  s.n_scored = static_cast<int>(r2s.size());
  if (r2s.empty()) return s;
  std::sort(r2s.begin(), r2s.end());
  s.min = r2s.front();
  s.max = r2s.back();
  s.mean = std::accumulate(r2s.begin(), r2s.end(), 0.0) / static_cast<double>(r2s.size());
  const size_t n = r2s.size();
  s.median = n % 2 == 1 ? r2s[n / 2] : 0.5 * (r2s[n / 2 - 1] + r2s[n / 2]);
  return s;
}

std::vector<FeatureFamily> resolve_family_selection(const std::string& selection) {
  using FF = FeatureFamily;
  if (selection.empty())
    throw ValidationError("family selection is empty");
  if (selection == "All")
    return {FF::kTransportStructural, FF::kTransportUse, FF::kMeteorology,
            FF::kRemoteSensing,       FF::kEmissions,    FF::kLandUse,
            FF::kTemporal};
  if (selection == "Global") return {FF::kMeteorology, FF::kRemoteSensing, FF::kTemporal};
  if (selection == "Forecasting")
    return {FF::kTransportStructural, FF::kMeteorology, FF::kLandUse, FF::kTemporal};
  std::vector<FeatureFamily> out;
  size_t pos = 0;
  while (pos <= selection.size()) {
    size_t next = selection.find(',', pos);
    if (next == std::string::npos) next = selection.size();
    const std::string name = selection.substr(pos, next - pos);
    if (name.empty()) throw ValidationError("family selection has an empty entry");
    out.push_back(feature_family_from_string(name));
    pos = next + 1;
  }
  return out;
}

namespace {

// Deterministic fold assignment: sorted station ids, round-robin.
std::map<std::string, int> assign_folds(const std::vector<std::string>& station_ids, int k) {
  std::vector<std::string> unique = station_ids;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (static_cast<int>(unique.size()) < k)
    throw ValidationError("loov_experiment: need at least " + std::to_string(k) +
                          " stations, have " + std::to_string(unique.size()));
  std::map<std::string, int> fold;
  for (size_t i = 0; i < unique.size(); ++i)
    fold[unique[i]] = static_cast<int>(i % static_cast<size_t>(k));
  return fold;
}

struct ProtocolResult {
  gbdt::TrainConfig chosen;
  gbdt::Ensemble model;
  FitMetrics train, valid, test;
  std::vector<Trial> trials;
  std::vector<PeakReport> peaks;
};

ProtocolResult run_protocol(const TrainingTable& table, const ExperimentOptions& options,
                            uint64_t seed) {
  const SplitIndices split = temporal_split(table.timestamps, options.split);
  const TrainingTable train = table.select(split.train);
  const TrainingTable valid = table.select(split.valid);
  const TrainingTable test = table.select(split.test);

  SearchResult search = random_search(train, valid, options.space, options.base,
                                      options.n_configs, seed, options.workers);
  ProtocolResult out;
  out.chosen = search.trials[search.best_index].config;
  out.trials = std::move(search.trials);

  {  // metrics of the search winner on its own train/valid rows
    const gbdt::Ensemble winner = gbdt::fit(train.view(), train.y, valid.view(), valid.y,
                                            train.column_names(), out.chosen);
    out.train = score_model(winner, train, options.workers);
    out.valid = score_model(winner, valid, options.workers);
  }

  std::vector<size_t> tv;
  tv.reserve(split.train.size() + split.valid.size());
  tv.insert(tv.end(), split.train.begin(), split.train.end());
  tv.insert(tv.end(), split.valid.begin(), split.valid.end());
  FinalFitResult final = final_fit(out.chosen, table.select(tv), test, options.workers);
  out.model = std::move(final.model);
  out.test = final.test;

  // Per-station prediction error at the measured test-year peak.
  const std::vector<double> predicted = out.model.predict(test.view(), options.workers);
  std::map<std::string, std::vector<size_t>> by_station;
  for (size_t i = 0; i < test.n_rows(); ++i) by_station[test.station_ids[i]].push_back(i);
  for (const auto& [station, rows] : by_station) {
    std::vector<UtcHour> ts;
    std::vector<double> measured, pred;
    for (size_t i : rows) {
      ts.push_back(test.timestamps[i]);
      measured.push_back(test.y[i]);
      pred.push_back(predicted[i]);
    }
    out.peaks.push_back(peak_distance(station, "", ts, measured, pred));
  }
  return out;
}

}  // namespace

std::vector<LoovStationScore> loov_experiment(const TrainingTable& table,
                                              const ExperimentOptions& options) {
  const auto folds = assign_folds(table.station_ids, options.loov_folds);
  std::vector<LoovStationScore> scores;

  std::optional<gbdt::TrainConfig> reused_config;
  if (!options.loov_research_per_fold) {
    // One search over all stations, reused in every fold.
    const SplitIndices split = temporal_split(table.timestamps, options.split);
    SearchResult search = random_search(table.select(split.train), table.select(split.valid),
                                        options.space, options.base, options.n_configs,
                                        options.seed, options.workers);
    reused_config = search.trials[search.best_index].config;
  }

  for (int fold = 0; fold < options.loov_folds; ++fold) {
    std::vector<size_t> retained, held_out;
    for (size_t i = 0; i < table.n_rows(); ++i) {
      if (folds.at(table.station_ids[i]) == fold) held_out.push_back(i);
      else retained.push_back(i);
    }
    if (held_out.empty()) continue;
    const TrainingTable held = table.select(held_out);
    const TrainingTable kept = table.select(retained);

    gbdt::Ensemble model;
    if (reused_config) {
      const SplitIndices split = temporal_split(kept.timestamps, options.split);
      std::vector<size_t> tv;
      tv.insert(tv.end(), split.train.begin(), split.train.end());
      tv.insert(tv.end(), split.valid.begin(), split.valid.end());
      model = final_fit(*reused_config, kept.select(tv), kept.select(split.test),
                        options.workers)
                  .model;
    } else {
      model = run_protocol(kept, options, mix_seed(options.seed, static_cast<uint64_t>(fold)))
                  .model;
    }

    // Score each held-out station's complete series.
    std::map<std::string, std::vector<size_t>> rows_by_station;
    for (size_t i = 0; i < held.n_rows(); ++i)
      rows_by_station[held.station_ids[i]].push_back(i);
    for (const auto& [station, rows] : rows_by_station) {
      LoovStationScore score;
      score.station_id = station;
      score.fold = fold;
      if (rows.size() < 2) {
        score.skipped = true;
        score.skip_reason = "fewer than 2 observations";
      } else {
        const TrainingTable series = held.select(rows);
        const auto pred = model.predict(series.view(), options.workers);
        const auto r2 = r_squared(pred, series.y);
        if (r2) {
          score.r2 = r2;
        } else {
          score.skipped = true;
          score.skip_reason = "constant measured series";
        }
      }
      scores.push_back(std::move(score));
    }
  }
  std::sort(scores.begin(), scores.end(),
            [](const LoovStationScore& a, const LoovStationScore& b) {
              return a.station_id < b.station_id;
            });
  return scores;
}

ExperimentReport run_experiment(const TrainingTable& table, const std::string& pollutant,
                                const ExperimentOptions& options) {
  const auto families = resolve_family_selection(options.subset);
  const TrainingTable sub = table.restrict_to(families);

  ExperimentReport report;
  report.pollutant = pollutant;
  report.subset_label = options.subset;
  report.n_columns = sub.X.schema.size();
  report.schema_hash = sub.X.schema.hash();

  ProtocolResult protocol = run_protocol(sub, options, options.seed);
  report.chosen = protocol.chosen;
  report.train = protocol.train;
  report.valid = protocol.valid;
  report.test = protocol.test;
  report.trials = std::move(protocol.trials);
  report.peaks = std::move(protocol.peaks);
  for (PeakReport& p : report.peaks) p.pollutant = pollutant;
  if (!report.peaks.empty()) report.mean_peak_distance_pct = mean_peak_distance(report.peaks);

  if (options.run_loov) {
    report.loov_scores = loov_experiment(sub, options);
    report.loov_summary = summarize_loov(report.loov_scores);
  }
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

void ExperimentReport::write(const std::string& dir, const std::string& prefix) const {
  {
    std::ofstream out(dir + "/" + prefix + "_scores.csv");
    if (!out) throw ValidationError("cannot write report scores");
    out << "pollutant,subset,n_columns,schema_hash,train_r2,valid_r2,test_r2,"
           "train_mse_log,valid_mse_log,test_mse_log,"
           "num_leaves,min_data_in_leaf,l2_lambda,learning_rate\n";
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, schema_hash);
    out << pollutant << ',' << subset_label << ',' << n_columns << ',' << hash << ','
        << fmt_opt(train.r2) << ',' << fmt_opt(valid.r2) << ',' << fmt_opt(test.r2) << ','
        << fmt(train.mse_log) << ',' << fmt(valid.mse_log) << ',' << fmt(test.mse_log)
        << ',' << chosen.num_leaves << ',' << chosen.min_data_in_leaf << ','
        << fmt(chosen.l2_lambda) << ',' << fmt(chosen.learning_rate) << '\n';
  }
  {
    std::ofstream out(dir + "/" + prefix + "_trials.csv");
    if (!out) throw ValidationError("cannot write report trials");
    out << "trial,num_leaves,min_data_in_leaf,l2_lambda,learning_rate,valid_mse_log,ok,error\n";
    for (size_t i = 0; i < trials.size(); ++i) {
      const Trial& t = trials[i];
      out << i << ',' << t.config.num_leaves << ',' << t.config.min_data_in_leaf << ','
          << fmt(t.config.l2_lambda) << ',' << fmt(t.config.learning_rate) << ','
          << (t.ok ? fmt(t.valid_mse_log) : std::string()) << ',' << (t.ok ? 1 : 0) << ','
          << csv::quote(t.error) << '\n';
    }
  }
  if (!peaks.empty()) {
    std::ofstream out(dir + "/" + prefix + "_peaks.csv");
    if (!out) throw ValidationError("cannot write peak report");
    out << "station_id,pollutant,measured_peak,peak_timestamp,model_prediction,"
           "peak_distance_pct\n";
    for (const PeakReport& p : peaks)
      out << p.station_id << ',' << p.pollutant << ',' << fmt(p.measured_peak) << ','
          << format_iso_hour(p.peak_timestamp) << ',' << fmt(p.model_prediction_at_peak)
          << ',' << fmt(p.peak_distance_pct) << '\n';
    out << "MEAN," << pollutant << ",,,," << fmt(*mean_peak_distance_pct) << '\n';
  }
  if (!loov_scores.empty()) {
    std::ofstream out(dir + "/" + prefix + "_loov.csv");
    if (!out) throw ValidationError("cannot write LOOV scores");
    out << "station_id,fold,r2,skipped,skip_reason\n";
    for (const auto& s : loov_scores)
      out << s.station_id << ',' << s.fold << ',' << fmt_opt(s.r2) << ','
          << (s.skipped ? 1 : 0) << ',' << csv::quote(s.skip_reason) << '\n';
  }
  if (loov_summary) {
    std::ofstream out(dir + "/" + prefix + "_loov_summary.csv");
    if (!out) throw ValidationError("cannot write LOOV summary");
    out << "pollutant,max,min,mean,median,n_scored,n_skipped\n";
    out << pollutant << ',' << fmt(loov_summary->max) << ',' << fmt(loov_summary->min)
        << ',' << fmt(loov_summary->mean) << ',' << fmt(loov_summary->median) << ','
        << loov_summary->n_scored << ',' << loov_summary->n_skipped << '\n';
  }
}

Recipe::Recipe() {
  // Desk-scale defaults; the production-scale search range stays available by
  // setting the bounds explicitly in the recipe.
  options.space.num_leaves_min = 15;
  options.space.num_leaves_max = 63;
  options.space.min_data_in_leaf_min = 10;
  options.space.min_data_in_leaf_max = 60;
  options.base.max_trees = 150;
  options.n_configs = 8;
  options.split.train_years = {2016};
  options.split.validation_years = {2017};
  options.split.test_years = {2018};
}

namespace {

std::set<int> parse_year_set(const std::string& v, const std::string& key) {
  std::set<int> out;
  size_t pos = 0;
  while (pos <= v.size()) {
    size_t next = v.find(',', pos);
    if (next == std::string::npos) next = v.size();
    const std::string tok = v.substr(pos, next - pos);
    if (!tok.empty()) out.insert(static_cast<int>(csv::parse_int(tok, key)));
    pos = next + 1;
  }
  if (out.empty()) throw ValidationError("recipe: empty year list for " + key);
  return out;
}

}  // namespace

Recipe load_recipe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open recipe '" + path + "'");
  Recipe r;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto strip = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string stripped = strip(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ValidationError("recipe line " + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key = strip(stripped.substr(0, eq));
    const std::string value = strip(stripped.substr(eq + 1));
    const std::string ctx = "recipe line " + std::to_string(line_no);
    if (key == "world_dir") r.world_dir = value;
    else if (key == "out_prefix") r.out_prefix = value;
    else if (key == "pollutant") r.pollutant = pollutant_from_string(value);
    else if (key == "families") { r.families = value; r.options.subset = value; }
    else if (key == "train_years") r.options.split.train_years = parse_year_set(value, ctx);
    else if (key == "validation_years")
      r.options.split.validation_years = parse_year_set(value, ctx);
    else if (key == "test_years") r.options.split.test_years = parse_year_set(value, ctx);
    else if (key == "n_configs") r.options.n_configs = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "seed") { r.options.seed = static_cast<uint64_t>(csv::parse_int(value, ctx)); }
    else if (key == "num_leaves_min") r.options.space.num_leaves_min = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "num_leaves_max") r.options.space.num_leaves_max = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "min_data_in_leaf_min") r.options.space.min_data_in_leaf_min = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "min_data_in_leaf_max") r.options.space.min_data_in_leaf_max = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "l2_lambda_min") r.options.space.l2_lambda_min = csv::parse_double(value, ctx);
    else if (key == "l2_lambda_max") r.options.space.l2_lambda_max = csv::parse_double(value, ctx);
    else if (key == "learning_rate_min") r.options.space.learning_rate_min = csv::parse_double(value, ctx);
    else if (key == "learning_rate_max") r.options.space.learning_rate_max = csv::parse_double(value, ctx);
    else if (key == "max_trees") r.options.base.max_trees = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "early_stopping_rounds") r.options.base.early_stopping_rounds = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "goss_top_rate") r.options.base.goss_top_rate = csv::parse_double(value, ctx);
    else if (key == "goss_other_rate") r.options.base.goss_other_rate = csv::parse_double(value, ctx);
    else if (key == "use_goss") r.options.base.use_goss = csv::parse_int(value, ctx) != 0;
    else if (key == "run_loov") r.options.run_loov = csv::parse_int(value, ctx) != 0;
    else if (key == "loov_folds") r.options.loov_folds = static_cast<int>(csv::parse_int(value, ctx));
    else if (key == "loov_research_per_fold") r.options.loov_research_per_fold = csv::parse_int(value, ctx) != 0;
    else throw ValidationError(ctx + ": unknown key '" + key + "'");
  }
  return r;
}

}  // namespace airgrid
