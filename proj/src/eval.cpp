#include "airgrid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "airgrid/errors.hpp"

namespace airgrid {

std::optional<double> r_squared(std::span<const double> predictions,
                                std::span<const double> actuals) {
  if (predictions.size() != actuals.size())
    throw ValidationError("r_squared: length mismatch");
  if (actuals.size() < 2) throw ValidationError("r_squared: need at least 2 points");
  double mean = 0.0;
  for (double a : actuals) mean += a;
  mean /= static_cast<double>(actuals.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < actuals.size(); ++i) {
    ss_res += (actuals[i] - predictions[i]) * (actuals[i] - predictions[i]);
    ss_tot += (actuals[i] - mean) * (actuals[i] - mean);
  }
  if (ss_tot <= 0.0) return std::nullopt;  // constant actuals
  return 1.0 - ss_res / ss_tot;
}

PeakReport peak_distance(const std::string& station_id, const std::string& pollutant,
                         std::span<const UtcHour> timestamps,
                         std::span<const double> measured,
                         std::span<const double> predicted) {
  if (timestamps.size() != measured.size() || measured.size() != predicted.size())
    throw ValidationError("peak_distance: series are not aligned");
  size_t peak = SIZE_MAX;
  for (size_t i = 0; i < measured.size(); ++i) {
    if (!std::isfinite(measured[i])) continue;
    if (peak == SIZE_MAX || measured[i] > measured[peak]) peak = i;  // earliest on ties
  }
  if (peak == SIZE_MAX)
    throw ValidationError("peak_distance: no finite measured value");
  if (!std::isfinite(predicted[peak]))
    throw DataGapError("peak_distance: no prediction at the peak timestamp " +
                       format_iso_hour(timestamps[peak]));
  PeakReport r;
  r.station_id = station_id;
  r.pollutant = pollutant;
  r.measured_peak = measured[peak];
  r.peak_timestamp = timestamps[peak];
  r.model_prediction_at_peak = predicted[peak];
  r.peak_distance_pct =
      (r.measured_peak - r.model_prediction_at_peak) / r.measured_peak * 100.0;
  return r;
}

double mean_peak_distance(const std::vector<PeakReport>& reports) {
  if (reports.empty()) throw ValidationError("mean_peak_distance: no reports");
  double sum = 0.0;
  for (const PeakReport& r : reports) sum += r.peak_distance_pct;
  return sum / static_cast<double>(reports.size());
}

int64_t exceedance_count(std::span<const double> hourly, double threshold) {
  int64_t n = 0;
  for (double v : hourly)
    if (v > threshold) ++n;
  return n;
}

std::vector<double> running_mean_24h(std::span<const double> hourly) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> out(hourly.size(), nan);
  for (size_t i = 23; i < hourly.size(); ++i) {
    double sum = 0.0;
    bool complete = true;
    for (size_t j = i - 23; j <= i; ++j) {
      if (std::isnan(hourly[j])) {
        complete = false;  // a missing hour poisons the whole window
        break;
      }
      sum += hourly[j];
    }
    if (complete) out[i] = sum / 24.0;
  }
  return out;
}

void ExceedanceMap::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "cell_id,count\n";
  for (size_t i = 0; i < cells.size(); ++i) out << cells[i] << ',' << counts[i] << '\n';
}

double exceedance_share(const ExceedanceMap& map) {
  if (map.cells.empty()) throw ValidationError("exceedance_share: empty map");
  int64_t hit = 0;
  for (int64_t c : map.counts)
    if (c >= 1) ++hit;
  return static_cast<double>(hit) / static_cast<double>(map.cells.size());
}

namespace {

void write_pgm(const StudyArea& area, const std::vector<int>& shade,
               const std::string& path) {
  int32_t min_row = INT32_MAX, max_row = INT32_MIN, min_col = INT32_MAX, max_col = INT32_MIN;
  for (const GridCell& c : area.cells()) {
    min_row = std::min(min_row, c.row);
    max_row = std::max(max_row, c.row);
    min_col = std::min(min_col, c.col);
    max_col = std::max(max_col, c.col);
  }
  const int width = max_col - min_col + 1;
  const int height = max_row - min_row + 1;
  std::vector<int> raster(static_cast<size_t>(width) * height, 0);
  for (const GridCell& c : area.cells()) {
    // top row of the image is the largest grid row
    const int y = max_row - c.row;
    const int x = c.col - min_col;
    raster[static_cast<size_t>(y) * width + x] = shade[static_cast<size_t>(c.cell_id)];
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "P2\n" << width << ' ' << height << "\n255\n";
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x) out << ' ';
      out << raster[static_cast<size_t>(y) * width + x];
    }
    out << '\n';
  }
}

}  // namespace

void write_exceedance_pgm(const ExceedanceMap& map, const StudyArea& area,
                          const std::string& path) {
  int64_t max_count = 0;
  for (int64_t c : map.counts) max_count = std::max(max_count, c);
  std::vector<int> shade(area.cell_count(), 0);
  for (size_t i = 0; i < map.cells.size(); ++i) {
    const int v = max_count == 0
                      ? 0
                      : static_cast<int>(std::lround(255.0 * static_cast<double>(map.counts[i]) /
                                                     static_cast<double>(max_count)));
    shade[static_cast<size_t>(map.cells[i])] = v;
  }
  write_pgm(area, shade, path);
}

void write_value_pgm(const StudyArea& area, std::span<const double> cell_values,
                     const std::string& path) {
  if (cell_values.size() != area.cell_count())
    throw ValidationError("write_value_pgm: value count does not match cells");
  double max_v = 0.0;
  for (double v : cell_values) max_v = std::max(max_v, v);
  std::vector<int> shade(area.cell_count(), 0);
  for (size_t i = 0; i < cell_values.size(); ++i)
    shade[i] = max_v == 0.0 ? 0 : static_cast<int>(std::lround(255.0 * cell_values[i] / max_v));
  write_pgm(area, shade, path);
}

}  // namespace airgrid
