#include "airgrid/predict.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "airgrid/errors.hpp"
#include "airgrid/worker_pool.hpp"

namespace airgrid {

void AugmentedSeries::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "timestamp,value,source\n";
  char buf[40];
  for (const AugmentedEntry& e : entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out << format_iso_hour(e.timestamp) << ',' << buf << ','
        << (e.source == ValueSource::kMeasured ? "Measured" : "Predicted") << '\n';
  }
}

AugmentedSeries fill_gaps(const std::vector<Measurement>& measurements,
                          const gbdt::Ensemble& model, const FeatureStore& store,
                          const std::string& station_id, Pollutant pollutant,
                          CellId station_cell, UtcHour span_begin, UtcHour span_end) {
  if (span_end < span_begin)
    throw ValidationError("fill_gaps: span end precedes span begin");

  std::map<int64_t, double> measured;
  for (const Measurement& m : measurements) {
    if (m.station_id != station_id || m.pollutant != pollutant) continue;
    if (m.timestamp < span_begin || span_end < m.timestamp) continue;
    measured.emplace(m.timestamp.value, m.value);  // first wins on duplicates
  }

  const int64_t n_hours = span_end - span_begin + 1;
  std::vector<std::pair<CellId, UtcHour>> gap_keys;
  for (int64_t h = 0; h < n_hours; ++h) {
    const UtcHour t = span_begin + h;
    if (!measured.count(t.value)) gap_keys.emplace_back(station_cell, t);
  }

  std::vector<double> predictions;
  if (!gap_keys.empty()) {
    const FeatureMatrix rows = store.assemble_pairs(gap_keys);
    predictions =
        model.predict({rows.values.data(), rows.n_rows(), rows.schema.size()}, 1);
  }

  AugmentedSeries out;
  out.station_id = station_id;
  out.pollutant = pollutant;
  out.entries.reserve(static_cast<size_t>(n_hours));
  size_t gap_i = 0;
  for (int64_t h = 0; h < n_hours; ++h) {
    const UtcHour t = span_begin + h;
    const auto it = measured.find(t.value);
    if (it != measured.end()) {
      out.entries.push_back({t, it->second, ValueSource::kMeasured});
    } else {
      out.entries.push_back({t, predictions[gap_i++], ValueSource::kPredicted});
    }
  }
  return out;
}

void GridPrediction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "cell_id,timestamp,value\n";
  char buf[40];
  for (size_t i = 0; i < keys.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << keys[i].first << ',' << format_iso_hour(keys[i].second) << ',' << buf << '\n';
  }
}

GridPrediction grid_predict(const gbdt::Ensemble& model, const FeatureStore& store,
                            const std::vector<CellId>& cells,
                            const std::vector<UtcHour>& timestamps, int workers,
                            size_t batch_rows) {
  if (cells.empty() || timestamps.empty())
    throw ValidationError("grid_predict: no cells or timestamps requested");
  if (batch_rows == 0) batch_rows = 1;

  GridPrediction out;
  const size_t n_rows = cells.size() * timestamps.size();
  out.keys.reserve(n_rows);
  for (CellId c : cells)
    for (UtcHour t : timestamps) out.keys.emplace_back(c, t);
  out.values.resize(n_rows);

  // Shard by whole cells so per-cell family lookups stay within one worker;
  // rows are materialized lazily per shard to bound memory.
  size_t cells_per_shard = std::max<size_t>(1, batch_rows / timestamps.size());
  const auto started = std::chrono::steady_clock::now();
  run_blocks(cells.size(), cells_per_shard, workers, [&](size_t cell_begin, size_t cell_end) {
    std::vector<double> row(kNumFeatureColumns);
    for (size_t ci = cell_begin; ci < cell_end; ++ci) {
      for (size_t ti = 0; ti < timestamps.size(); ++ti) {
        store.materialize_row(cells[ci], timestamps[ti], row);
        out.values[ci * timestamps.size() + ti] = model.predict_row(row);
      }
    }
  });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  out.rows_per_second = seconds > 0.0 ? static_cast<double>(n_rows) / seconds : 0.0;
  return out;
}

}  // namespace airgrid
