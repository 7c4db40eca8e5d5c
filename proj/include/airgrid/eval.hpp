#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airgrid/grid.hpp"
#include "airgrid/timeutil.hpp"

namespace airgrid {

// 1 - SS_res/SS_tot about the actuals' mean; nullopt when the actuals are all
// identical. Throws below 2 points.
std::optional<double> r_squared(std::span<const double> predictions,
                                std::span<const double> actuals);

struct PeakReport {
  std::string station_id;
  std::string pollutant;
  double measured_peak;              // ug/m3
  UtcHour peak_timestamp;            // earliest on ties
  double model_prediction_at_peak;   // ug/m3
  double peak_distance_pct;          // (measured - prediction) / measured * 100
};

// Signed relative error of the model at the station's maximum measured value.
PeakReport peak_distance(const std::string& station_id, const std::string& pollutant,
                         std::span<const UtcHour> timestamps,
                         std::span<const double> measured,
                         std::span<const double> predicted);

double mean_peak_distance(const std::vector<PeakReport>& reports);

// Values strictly greater than the threshold.
int64_t exceedance_count(std::span<const double> hourly, double threshold);

// Trailing 24-hour window mean; entries 0..22 and any window containing a NaN
// are NaN. Input must be chronologically ordered at hourly spacing.
std::vector<double> running_mean_24h(std::span<const double> hourly);

struct ExceedanceMap {
  double threshold = 0.0;
  int64_t period_hours = 0;               // e.g. 8760 for a non-leap year
  std::vector<CellId> cells;
  std::vector<int64_t> counts;            // parallel to cells

  void write_csv(const std::string& path) const;
};

double exceedance_share(const ExceedanceMap& map);

// Greyscale raster over the study-area bounding box; masked-out cells are 0,
// counted cells scale to round(255 * count / max_count).
void write_exceedance_pgm(const ExceedanceMap& map, const StudyArea& area,
                          const std::string& path);
void write_value_pgm(const StudyArea& area, std::span<const double> cell_values,
                     const std::string& path);

}  // namespace airgrid
