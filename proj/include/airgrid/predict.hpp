#pragma once

#include <string>
#include <vector>

#include "airgrid/feature_matrix.hpp"
#include "airgrid/gbdt.hpp"

namespace airgrid {

enum class ValueSource { kMeasured, kPredicted };

struct AugmentedEntry {
  UtcHour timestamp;
  double value;  // ug/m3
  ValueSource source;
};

struct AugmentedSeries {
  std::string station_id;
  Pollutant pollutant;
  std::vector<AugmentedEntry> entries;  // hourly, covering the full span

  void write_csv(const std::string& path) const;
};

// Hourly series over [span_begin, span_end]: timestamps with a measurement
// keep it bitwise; all others receive model predictions.
AugmentedSeries fill_gaps(const std::vector<Measurement>& measurements,
                          const gbdt::Ensemble& model, const FeatureStore& store,
                          const std::string& station_id, Pollutant pollutant,
                          CellId station_cell, UtcHour span_begin, UtcHour span_end);

struct GridPrediction {
  std::vector<std::pair<CellId, UtcHour>> keys;  // cell-major, then time
  std::vector<double> values;                    // ug/m3
  double rows_per_second = 0.0;

  void write_csv(const std::string& path) const;
};

// Synthetic-station sweep: one prediction per (cell, timestamp). Work is
// sharded by cell blocks so per-cell caches load once per shard; results are
// bitwise identical for any worker count.
GridPrediction grid_predict(const gbdt::Ensemble& model, const FeatureStore& store,
                            const std::vector<CellId>& cells,
                            const std::vector<UtcHour>& timestamps, int workers,
                            size_t batch_rows = 65536);

}  // namespace airgrid
