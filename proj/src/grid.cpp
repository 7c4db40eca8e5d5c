#include "airgrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "airgrid/csv.hpp"
#include "airgrid/errors.hpp"

namespace airgrid {

namespace {

int64_t pack_rc(int32_t row, int32_t col) {
  return (static_cast<int64_t>(static_cast<uint32_t>(row)) << 32) |
         static_cast<uint32_t>(col);
}

}  // namespace

const char* to_string(EnvironmentClass c) {
  switch (c) {
    case EnvironmentClass::kUrbanBackground: return "UrbanBackground";
    case EnvironmentClass::kUrbanTraffic: return "UrbanTraffic";
    case EnvironmentClass::kUrbanIndustrial: return "UrbanIndustrial";
    case EnvironmentClass::kSuburbanBackground: return "SuburbanBackground";
    case EnvironmentClass::kSuburbanIndustrial: return "SuburbanIndustrial";
    case EnvironmentClass::kRuralBackground: return "RuralBackground";
  }
  return "?";
}

EnvironmentClass environment_class_from_string(const std::string& s) {
  for (EnvironmentClass c :
       {EnvironmentClass::kUrbanBackground, EnvironmentClass::kUrbanTraffic,
        EnvironmentClass::kUrbanIndustrial, EnvironmentClass::kSuburbanBackground,
        EnvironmentClass::kSuburbanIndustrial, EnvironmentClass::kRuralBackground}) {
    if (s == to_string(c)) return c;
  }
  throw ValidationError("unknown environment class '" + s + "'");
}

StudyArea::StudyArea(Point origin, double cell_size,
                     const std::vector<std::pair<int32_t, int32_t>>& mask)
    : origin_(origin), cell_size_(cell_size) {
  if (cell_size <= 0.0) throw ValidationError("cell_size must be positive");
  if (mask.empty()) throw ValidationError("study area mask is empty");

  std::vector<std::pair<int32_t, int32_t>> sorted = mask;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  cells_.reserve(sorted.size());
  index_by_rc_.reserve(sorted.size());
  for (const auto& [row, col] : sorted) {
    GridCell c;
    c.cell_id = static_cast<CellId>(cells_.size());
    c.row = row;
    c.col = col;
    c.centroid_x = origin_.x + (col + 0.5) * cell_size_;
    c.centroid_y = origin_.y + (row + 0.5) * cell_size_;
    index_by_rc_.emplace(pack_rc(row, col), cells_.size());
    cells_.push_back(c);
  }
}

const GridCell& StudyArea::cell(CellId id) const {
  if (id < 0 || static_cast<size_t>(id) >= cells_.size())
    throw ValidationError("unknown cell_id " + std::to_string(id));
  return cells_[static_cast<size_t>(id)];
}

bool StudyArea::contains(int32_t row, int32_t col) const {
  return index_by_rc_.count(pack_rc(row, col)) > 0;
}

CellId StudyArea::cell_lookup(double x, double y) const {
  const double fc = std::floor((x - origin_.x) / cell_size_);
  const double fr = std::floor((y - origin_.y) / cell_size_);
  const int32_t col = static_cast<int32_t>(fc);
  const int32_t row = static_cast<int32_t>(fr);
  const auto it = index_by_rc_.find(pack_rc(row, col));
  if (it == index_by_rc_.end()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "point (%g, %g) is outside the study area mask", x, y);
    throw ValidationError(buf);
  }
  return cells_[it->second].cell_id;
}

std::pair<CellId, double> StudyArea::snap_to_centroid(Point p) const {
  const CellId id = cell_lookup(p.x, p.y);
  const GridCell& c = cells_[static_cast<size_t>(id)];
  const double dx = p.x - c.centroid_x;
  const double dy = p.y - c.centroid_y;
  return {id, std::sqrt(dx * dx + dy * dy)};
}

StationSite StudyArea::make_station(const std::string& station_id, const std::string& name,
                                    EnvironmentClass env, Point true_location) const {
  StationSite s;
  s.station_id = station_id;
  s.name = name;
  s.environment_class = env;
  s.true_x = true_location.x;
  s.true_y = true_location.y;
  std::tie(s.snapped_cell, s.abstraction_distance_m) = snap_to_centroid(true_location);
  return s;
}

StudyArea StudyArea::load(const std::string& path) {
  csv::Reader reader(path);
  const auto& h = reader.header();
  if (h.size() != 3)
    throw ValidationError("'" + path + "': expected header origin_x,origin_y,cell_size");
  const Point origin{csv::parse_double(h[0], path), csv::parse_double(h[1], path)};
  const double cell_size = csv::parse_double(h[2], path);
  std::vector<std::pair<int32_t, int32_t>> mask;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() != 2)
      throw ValidationError("'" + path + "' line " + std::to_string(reader.line_number()) +
                            ": expected row,col");
    mask.emplace_back(static_cast<int32_t>(csv::parse_int(fields[0], path)),
                      static_cast<int32_t>(csv::parse_int(fields[1], path)));
  }
  return StudyArea(origin, cell_size, mask);
}

void StudyArea::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", origin_.x, origin_.y, cell_size_);
  out << buf;
  for (const GridCell& c : cells_) out << c.row << ',' << c.col << '\n';
}

StudyArea build_study_area(Point origin, double cell_size,
                           const std::vector<std::pair<int32_t, int32_t>>& mask) {
  return StudyArea(origin, cell_size, mask);
}

StudyArea build_rect_study_area(Point origin, double cell_size, int32_t rows, int32_t cols) {
  std::vector<std::pair<int32_t, int32_t>> mask;
  mask.reserve(static_cast<size_t>(rows) * cols);
  for (int32_t r = 0; r < rows; ++r)
    for (int32_t c = 0; c < cols; ++c) mask.emplace_back(r, c);
  return StudyArea(origin, cell_size, mask);
}

}  // namespace airgrid
