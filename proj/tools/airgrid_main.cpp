#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "airgrid/csv.hpp"
#include "airgrid/errors.hpp"
#include "airgrid/eval.hpp"
#include "airgrid/feature_analysis.hpp"
#include "airgrid/predict.hpp"
#include "airgrid/train.hpp"
#include "airgrid/worldgen.hpp"

namespace fs = std::filesystem;
using namespace airgrid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDataGap = 3;
constexpr int kExitInternal = 4;

// Every output lands under --out-dir and is listed in its manifest.
class OutputTracker {
 public:
  explicit OutputTracker(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) {
    files_.push_back(name);
    return dir_ + "/" + name;
  }
  void write_manifest() {
    std::ofstream out(dir_ + "/manifest.txt");
    if (!out) throw ValidationError("cannot write manifest in '" + dir_ + "'");
    std::sort(files_.begin(), files_.end());
    files_.erase(std::unique(files_.begin(), files_.end()), files_.end());
    for (const std::string& name : files_) {
      char hash[24];
      std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a_file(dir_ + "/" + name));
      out << hash << "  " << name << '\n';
    }
  }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    const std::string tok = s.substr(pos, next - pos);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    pos = next + 1;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    const std::string tok = s.substr(pos, next - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    pos = next + 1;
  }
  return out;
}

TrainingTable load_table(Pollutant pollutant, WorldData& world) {
  const CleanResult cleaned = clean_measurements(world.raw_measurements);
  std::cerr << "measurements: kept " << cleaned.kept.size() << ", removed "
            << cleaned.removed_total() << " negative\n";
  return build_training_table(world.store, world.stations, cleaned.kept, pollutant);
}

int cmd_generate_world(const SyntheticWorldSpec& spec, const std::string& out_dir) {
  generate_world(spec, out_dir);
  std::cout << "world written to " << out_dir << " (" << spec.rows << "x" << spec.cols
            << ", " << spec.total_stations() << " stations)\n";
  return kExitOk;
}

int cmd_ingest_check(const std::string& world_dir) {
  WorldData world = WorldData::load(world_dir);
  const CleanResult cleaned = clean_measurements(world.raw_measurements);
  std::cout << "cells: " << world.area.cell_count() << '\n';
  std::cout << "stations: " << world.stations.size() << '\n';
  for (const StationSite& s : world.stations)
    std::cout << "  " << s.station_id << " " << to_string(s.environment_class) << " cell "
              << s.snapped_cell << " abstraction " << s.abstraction_distance_m << " m\n";
  std::cout << "measurements: " << world.raw_measurements.size() << " ("
            << cleaned.kept.size() << " kept after negative-value removal)\n";

  // Materialize one row per station at its first measurement hour.
  std::vector<std::pair<CellId, UtcHour>> probes;
  for (const StationSite& st : world.stations)
    for (const Measurement& m : cleaned.kept)
      if (m.station_id == st.station_id) {
        probes.emplace_back(st.snapped_cell, m.timestamp);
        break;
      }
  if (!probes.empty()) {
    const FeatureMatrix rows = world.store.assemble_pairs(probes);
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, rows.schema.hash());
    std::cout << "feature columns: " << rows.schema.size() << " (schema " << hash << ")\n";
  }
  std::cout << "ingest-check ok\n";
  return kExitOk;
}

int cmd_features(const std::string& world_dir, const std::string& pollutant,
                 const std::string& out_dir, size_t max_rows) {
  WorldData world = WorldData::load(world_dir);
  const TrainingTable table = load_table(pollutant_from_string(pollutant), world);

  std::map<std::string, EnvironmentClass> class_of;
  for (const StationSite& s : world.stations) class_of[s.station_id] = s.environment_class;

  std::map<std::string, std::vector<size_t>> rows_by_station;
  for (size_t i = 0; i < table.n_rows(); ++i)
    rows_by_station[table.station_ids[i]].push_back(i);

  std::vector<StationSeries> series;
  for (const auto& [station, rows] : rows_by_station) {
    StationSeries s;
    s.station_id = station;
    s.environment_class = class_of.at(station);
    TrainingTable sub = table.select(rows);
    s.features = std::move(sub.X);
    s.targets = std::move(sub.y);
    series.push_back(std::move(s));
  }

  OutputTracker out(out_dir);
  const CorrelationReport report = correlation_report(series);
  report.write_csv(out.path("correlation_report.csv"));

  // Dendrogram over a deterministic row subsample. Columns observed at no
  // station (constant everywhere) are excluded and reported separately.
  std::vector<size_t> keep;
  const size_t stride = max_rows == 0 ? 1 : std::max<size_t>(1, table.n_rows() / max_rows);
  for (size_t i = 0; i < table.n_rows(); i += stride) keep.push_back(i);
  const TrainingTable sub = table.select(keep);
  const DissimilarityMatrix dis = feature_dissimilarity(sub.X);

  std::vector<size_t> active;
  for (size_t i = 0; i < dis.n; ++i)
    if (!dis.undefined_col[i]) active.push_back(i);
  DissimilarityMatrix reduced;
  reduced.n = active.size();
  reduced.d.assign(active.size() * active.size(), 0.0);
  reduced.undefined_col.assign(active.size(), false);
  for (size_t i = 0; i < active.size(); ++i)
    for (size_t j = 0; j < active.size(); ++j)
      reduced.d[i * active.size() + j] = dis.at(active[i], active[j]);

  const FeatureDendrogram dendro = hierarchical_cluster(reduced);
  dendro.write_csv(out.path("dendrogram.csv"));
  {
    std::ofstream leaves(out.path("dendrogram_features.csv"));
    leaves << "leaf,feature\n";
    for (size_t i = 0; i < active.size(); ++i)
      leaves << i << ',' << sub.X.schema.column(active[i]).name << '\n';
  }
  {
    std::ofstream excluded(out.path("excluded_features.csv"));
    excluded << "feature\n";
    for (size_t i = 0; i < dis.n; ++i)
      if (dis.undefined_col[i]) excluded << sub.X.schema.column(i).name << '\n';
  }
  out.write_manifest();
  std::cout << "correlation report and dendrogram written to " << out_dir << " ("
            << active.size() << " clustered, " << (dis.n - active.size())
            << " excluded columns)\n";
  return kExitOk;
}

int run_recipe(const std::string& recipe_path, const std::string& out_dir, int workers,
               int64_t seed_override, bool force_loov) {
  Recipe recipe = load_recipe(recipe_path);
  if (recipe.world_dir.empty()) throw ValidationError("recipe is missing world_dir");
  recipe.options.workers = workers;
  if (seed_override >= 0) recipe.options.seed = static_cast<uint64_t>(seed_override);
  if (force_loov) recipe.options.run_loov = true;

  WorldData world = WorldData::load(recipe.world_dir);
  const TrainingTable table = load_table(recipe.pollutant, world);

  const ExperimentReport report =
      run_experiment(table, to_string(recipe.pollutant), recipe.options);

  OutputTracker out(out_dir);
  report.write(out_dir, recipe.out_prefix);
  out.path(recipe.out_prefix + "_scores.csv");
  out.path(recipe.out_prefix + "_trials.csv");
  if (!report.peaks.empty()) out.path(recipe.out_prefix + "_peaks.csv");
  if (!report.loov_scores.empty()) out.path(recipe.out_prefix + "_loov.csv");
  if (report.loov_summary) out.path(recipe.out_prefix + "_loov_summary.csv");

  // Refit artifact for the prediction commands.
  const auto sub = table.restrict_to(resolve_family_selection(recipe.options.subset));
  const SplitIndices split = temporal_split(sub.timestamps, recipe.options.split);
  std::vector<size_t> tv(split.train);
  tv.insert(tv.end(), split.valid.begin(), split.valid.end());
  FinalFitResult final =
      final_fit(report.chosen, sub.select(tv), sub.select(split.test), workers);
  final.model.schema_hash = sub.X.schema.hash();
  final.model.save(out.path(recipe.out_prefix + "_model.txt"));
  out.write_manifest();

  std::cout << "pollutant " << report.pollutant << " subset " << report.subset_label << " ("
            << report.n_columns << " columns)\n";
  auto show = [](const char* name, const FitMetrics& m) {
    std::cout << "  " << name << ": R2 "
              << (m.r2 ? std::to_string(*m.r2) : std::string("undefined")) << ", log-MSE "
              << m.mse_log << '\n';
  };
  show("train", report.train);
  show("valid", report.valid);
  show("test", report.test);
  if (report.loov_summary) {
    const LoovSummary& s = *report.loov_summary;
    std::cout << "  LOOV R2: max " << s.max << ", min " << s.min << ", mean " << s.mean
              << ", median " << s.median << " over " << s.n_scored << " stations ("
              << s.n_skipped << " skipped)\n";
  }
  std::cout << "reports written to " << out_dir << '\n';
  return kExitOk;
}

int cmd_predict_grid(const std::string& world_dir, const std::string& model_path,
                     const std::string& start, int hours, int workers,
                     const std::string& out_dir) {
  if (hours < 1) throw ValidationError("--hours must be >= 1");
  WorldData world = WorldData::load(world_dir);
  const gbdt::Ensemble model = gbdt::Ensemble::load(model_path);
  if (model.column_names.size() != kNumFeatureColumns)
    throw ValidationError("model was trained on a feature subset; predict-grid needs a "
                          "full-schema model");

  std::vector<CellId> cells;
  for (const GridCell& c : world.area.cells()) cells.push_back(c.cell_id);
  std::vector<UtcHour> times;
  const UtcHour begin = parse_iso_hour(start);
  for (int h = 0; h < hours; ++h) times.push_back(begin + h);

  const GridPrediction pred = grid_predict(model, world.store, cells, times, workers);

  OutputTracker out(out_dir);
  pred.write_csv(out.path("concentration_map.csv"));
  {  // quick-look raster for the first timestamp
    std::vector<double> first(world.area.cell_count(), 0.0);
    for (size_t i = 0; i < pred.keys.size(); ++i)
      if (pred.keys[i].second == times.front())
        first[static_cast<size_t>(pred.keys[i].first)] = pred.values[i];
    write_value_pgm(world.area, first, out.path("concentration_map.pgm"));
  }
  out.write_manifest();
  std::cout << "predicted " << pred.keys.size() << " rows at "
            << static_cast<int64_t>(pred.rows_per_second) << " rows/s into " << out_dir
            << '\n';
  return kExitOk;
}

int cmd_fill_gaps(const std::string& world_dir, const std::string& model_path,
                  const std::string& station, const std::string& pollutant,
                  const std::string& start, const std::string& end,
                  const std::string& out_dir) {
  WorldData world = WorldData::load(world_dir);
  const gbdt::Ensemble model = gbdt::Ensemble::load(model_path);
  const StationSite* site = nullptr;
  for (const StationSite& s : world.stations)
    if (s.station_id == station) site = &s;
  if (site == nullptr) throw ValidationError("unknown station '" + station + "'");

  const CleanResult cleaned = clean_measurements(world.raw_measurements);
  const AugmentedSeries series =
      fill_gaps(cleaned.kept, model, world.store, station, pollutant_from_string(pollutant),
                site->snapped_cell, parse_iso_hour(start), parse_iso_hour(end));

  OutputTracker out(out_dir);
  series.write_csv(out.path("augmented_" + station + ".csv"));
  out.write_manifest();
  int64_t measured = 0;
  for (const auto& e : series.entries)
    if (e.source == ValueSource::kMeasured) ++measured;
  std::cout << "augmented series for " << station << ": " << series.entries.size()
            << " hours, " << measured << " measured, "
            << (static_cast<int64_t>(series.entries.size()) - measured) << " predicted\n";
  return kExitOk;
}

int cmd_exceedance(const std::string& world_dir, const std::string& map_path,
                   const std::string& thresholds, const std::string& out_dir) {
  const std::vector<double> levels = parse_double_list(thresholds);
  if (levels.empty()) throw ValidationError("no thresholds given");
  WorldData world = WorldData::load(world_dir);

  // cell -> hourly values, from a concentration map CSV.
  std::map<CellId, std::vector<double>> series;
  {
    csv::Reader r(map_path);
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 3)
        throw ValidationError("'" + map_path + "': expected cell_id,timestamp,value");
      series[csv::parse_int(f[0], map_path)].push_back(csv::parse_double(f[2], map_path));
    }
  }
  if (series.empty()) throw DataGapError("'" + map_path + "' holds no rows");

  OutputTracker out(out_dir);
  for (double level : levels) {
    ExceedanceMap map;
    map.threshold = level;
    for (const auto& [cell, values] : series) {
      map.period_hours = static_cast<int64_t>(values.size());
      map.cells.push_back(cell);
      map.counts.push_back(exceedance_count(values, level));
    }
    char name[64];
    std::snprintf(name, sizeof name, "exceedance_%g", level);
    map.write_csv(out.path(std::string(name) + ".csv"));
    write_exceedance_pgm(map, world.area, out.path(std::string(name) + ".pgm"));
    std::cout << "threshold " << level
              << ": share of cells with any exceedance = " << exceedance_share(map) << '\n';
  }
  out.write_manifest();
  return kExitOk;
}

int cmd_report(const std::string& dir, const std::string& prefix) {
  bool any = false;
  for (const char* suffix :
       {"_scores.csv", "_loov_summary.csv", "_loov.csv", "_peaks.csv", "_trials.csv"}) {
    const std::string path = dir + "/" + prefix + suffix;
    std::ifstream in(path);
    if (!in) continue;
    any = true;
    std::cout << "== " << path << " ==\n";
    std::string line;
    while (std::getline(in, line)) std::cout << line << '\n';
  }
  if (!any)
    throw ValidationError("no report files with prefix '" + prefix + "' under '" + dir + "'");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"airgrid: grid-scale air quality estimation"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::string world_dir;
  std::string recipe_path;
  std::string model_path;
  std::string pollutant = "NO2";
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  int64_t seed = -1;

  app.add_option("--workers", workers, "worker threads (default: logical cores)");

  auto* gen = app.add_subcommand("generate-world", "write a synthetic input file tree");
  SyntheticWorldSpec spec;
  std::string years_arg = "2016,2017,2018";
  std::string stations_arg = "4,3,1,1,1,2";
  gen->add_option("--out-dir", out_dir, "world directory")->required();
  gen->add_option("--seed", seed, "world seed");
  gen->add_option("--rows", spec.rows, "grid rows");
  gen->add_option("--cols", spec.cols, "grid columns");
  gen->add_option("--years", years_arg, "comma list of calendar years");
  gen->add_option("--stations", stations_arg, "stations per environment class (6 counts)");
  gen->add_option("--adversarial", spec.adversarial_stations, "inverted-response stations");
  gen->add_option("--coverage", spec.measurement_coverage, "fraction of hours reported");
  gen->add_option("--noise", spec.noise_sigma, "measurement noise sigma");
  gen->add_option("--pollutant", pollutant, "pollutant name");

  auto* check = app.add_subcommand("ingest-check", "load and validate a world directory");
  check->add_option("--world", world_dir, "world directory")->required();

  auto* feat = app.add_subcommand("features", "correlation report and feature dendrogram");
  size_t max_rows = 100000;
  feat->add_option("--world", world_dir, "world directory")->required();
  feat->add_option("--pollutant", pollutant, "pollutant name");
  feat->add_option("--out-dir", out_dir, "output directory");
  feat->add_option("--max-rows", max_rows, "row cap for the dendrogram (0 = all)");

  auto* train_cmd = app.add_subcommand("train", "temporal-split protocol from a recipe");
  train_cmd->add_option("--recipe", recipe_path, "recipe file")->required();
  train_cmd->add_option("--out-dir", out_dir, "output directory");
  train_cmd->add_option("--seed", seed, "seed override");

  auto* loov_cmd = app.add_subcommand("loov", "station leave-one-out validation");
  loov_cmd->add_option("--recipe", recipe_path, "recipe file")->required();
  loov_cmd->add_option("--out-dir", out_dir, "output directory");
  loov_cmd->add_option("--seed", seed, "seed override");

  auto* subset_cmd = app.add_subcommand("subset", "dataset-family subsetting experiment");
  subset_cmd->add_option("--recipe", recipe_path, "recipe file")->required();
  subset_cmd->add_option("--out-dir", out_dir, "output directory");
  subset_cmd->add_option("--seed", seed, "seed override");

  auto* pg = app.add_subcommand("predict-grid", "full-map synthetic-station prediction");
  std::string start = "2018-01-19T08:00:00Z";
  int hours = 24;
  pg->add_option("--world", world_dir, "world directory")->required();
  pg->add_option("--model", model_path, "model file")->required();
  pg->add_option("--start", start, "first timestamp (ISO-8601 hour)");
  pg->add_option("--hours", hours, "number of hourly steps");
  pg->add_option("--out-dir", out_dir, "output directory");

  auto* fg = app.add_subcommand("fill-gaps", "augment a station series with predictions");
  std::string station, span_end = "2018-12-31T23:00:00Z";
  fg->add_option("--world", world_dir, "world directory")->required();
  fg->add_option("--model", model_path, "model file")->required();
  fg->add_option("--station", station, "station id")->required();
  fg->add_option("--pollutant", pollutant, "pollutant name");
  fg->add_option("--start", start, "span start");
  fg->add_option("--end", span_end, "span end (inclusive)");
  fg->add_option("--out-dir", out_dir, "output directory");

  auto* exc = app.add_subcommand("exceedance", "threshold exceedance maps from a map CSV");
  std::string map_path, thresholds = "10,25,40,200";
  exc->add_option("--world", world_dir, "world directory")->required();
  exc->add_option("--map", map_path, "concentration map CSV")->required();
  exc->add_option("--thresholds", thresholds, "comma list of ug/m3 thresholds");
  exc->add_option("--out-dir", out_dir, "output directory");

  auto* rep = app.add_subcommand("report", "print experiment report CSVs");
  std::string prefix = "experiment";
  rep->add_option("--dir", out_dir, "report directory")->required();
  rep->add_option("--prefix", prefix, "report prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (gen->parsed()) {
      spec.years = parse_int_list(years_arg);
      const std::vector<int> per_class = parse_int_list(stations_arg);
      if (per_class.size() != 6)
        throw ValidationError("--stations needs 6 comma-separated counts");
      for (size_t i = 0; i < 6; ++i)
        spec.stations_per_class[i] = per_class[i];
      spec.pollutant = pollutant_from_string(pollutant);
      if (seed >= 0) spec.seed = static_cast<uint64_t>(seed);
      return cmd_generate_world(spec, out_dir);
    }
    if (check->parsed()) return cmd_ingest_check(world_dir);
    if (feat->parsed()) return cmd_features(world_dir, pollutant, out_dir, max_rows);
    if (train_cmd->parsed()) return run_recipe(recipe_path, out_dir, workers, seed, false);
    if (loov_cmd->parsed()) return run_recipe(recipe_path, out_dir, workers, seed, true);
    if (subset_cmd->parsed()) return run_recipe(recipe_path, out_dir, workers, seed, false);
    if (pg->parsed())
      return cmd_predict_grid(world_dir, model_path, start, hours, workers, out_dir);
    if (fg->parsed())
      return cmd_fill_gaps(world_dir, model_path, station, pollutant, start, span_end,
                           out_dir);
    if (exc->parsed()) return cmd_exceedance(world_dir, map_path, thresholds, out_dir);
    if (rep->parsed()) return cmd_report(out_dir, prefix);
    throw ValidationError("no subcommand given");
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DataGapError& e) {
    std::cerr << "data gap: " << e.what() << '\n';
    return kExitDataGap;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
