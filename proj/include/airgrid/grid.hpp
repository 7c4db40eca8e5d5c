#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace airgrid {

using CellId = int64_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct GridCell {
  CellId cell_id;
  double centroid_x;
  double centroid_y;
  int32_t row;
  int32_t col;
};

enum class EnvironmentClass {
  kUrbanBackground,
  kUrbanTraffic,
  kUrbanIndustrial,
  kSuburbanBackground,
  kSuburbanIndustrial,
  kRuralBackground,
};
const char* to_string(EnvironmentClass c);
EnvironmentClass environment_class_from_string(const std::string& s);

struct StationSite {
  std::string station_id;
  std::string name;
  EnvironmentClass environment_class;
  double true_x;
  double true_y;
  CellId snapped_cell;
  double abstraction_distance_m;
};

// The Eulerian frame every dataset is projected onto. Cells are half-open
// squares [k*s, (k+1)*s) in both axes so each point maps to exactly one cell.
// Immutable after construction; safe to share across threads.
class StudyArea {
 public:
  StudyArea(Point origin, double cell_size,
            const std::vector<std::pair<int32_t, int32_t>>& mask);

  double origin_x() const { return origin_.x; }
  double origin_y() const { return origin_.y; }
  double cell_size() const { return cell_size_; }
  size_t cell_count() const { return cells_.size(); }
  const std::vector<GridCell>& cells() const { return cells_; }
  const GridCell& cell(CellId id) const;
  bool contains(int32_t row, int32_t col) const;

  // Floor-division mapping of a point to its containing masked cell.
  CellId cell_lookup(double x, double y) const;

  // (cell_id, planar distance to that cell's centroid).
  std::pair<CellId, double> snap_to_centroid(Point p) const;

  StationSite make_station(const std::string& station_id, const std::string& name,
                           EnvironmentClass env, Point true_location) const;

  static StudyArea load(const std::string& path);
  void save(const std::string& path) const;

 private:
  Point origin_;
  double cell_size_;
  std::vector<GridCell> cells_;                      // sorted by (row, col)
  std::unordered_map<int64_t, size_t> index_by_rc_;  // packed (row, col) -> cells_ index
};

StudyArea build_study_area(Point origin, double cell_size,
                           const std::vector<std::pair<int32_t, int32_t>>& mask);

// Convenience: full rows x cols rectangle.
StudyArea build_rect_study_area(Point origin, double cell_size, int32_t rows, int32_t cols);

}  // namespace airgrid
