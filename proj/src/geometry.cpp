#include "airgrid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "airgrid/errors.hpp"

namespace airgrid {

double point_segment_distance(Point p, Point a, Point b) {
  const double abx = b.x - a.x;
  const double aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double dx = p.x - (a.x + t * abx);
  const double dy = p.y - (a.y + t * aby);
  return std::sqrt(dx * dx + dy * dy);
}

double point_polyline_distance(Point p, const std::vector<Point>& polyline) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < polyline.size(); ++i)
    best = std::min(best, point_segment_distance(p, polyline[i], polyline[i + 1]));
  return best;
}

double polyline_length(const std::vector<Point>& polyline) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < polyline.size(); ++i) {
    const double dx = polyline[i + 1].x - polyline[i].x;
    const double dy = polyline[i + 1].y - polyline[i].y;
    len += std::sqrt(dx * dx + dy * dy);
  }
  return len;
}

namespace {

// Parameters in (0,1) where a + t*(b-a) crosses a grid line along one axis.
void axis_crossings(double a, double b, double origin, double step, std::vector<double>& ts) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (hi - lo <= 0.0) return;
  const int64_t k0 = static_cast<int64_t>(std::ceil((lo - origin) / step));
  const int64_t k1 = static_cast<int64_t>(std::floor((hi - origin) / step));
  for (int64_t k = k0; k <= k1; ++k) {
    const double line = origin + static_cast<double>(k) * step;
    const double t = (line - a) / (b - a);
    if (t > 0.0 && t < 1.0) ts.push_back(t);
  }
}

}  // namespace

std::vector<std::pair<CellId, double>> clip_polyline_to_cells(
    const std::vector<Point>& polyline, const StudyArea& area) {
  std::map<CellId, double> acc;
  std::vector<double> ts;
  for (size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Point a = polyline[i];
    const Point b = polyline[i + 1];
    const double seg_len = std::hypot(b.x - a.x, b.y - a.y);
    if (seg_len == 0.0) continue;
    ts.clear();
    ts.push_back(0.0);
    axis_crossings(a.x, b.x, area.origin_x(), area.cell_size(), ts);
    axis_crossings(a.y, b.y, area.origin_y(), area.cell_size(), ts);
    ts.push_back(1.0);
    std::sort(ts.begin(), ts.end());
    for (size_t j = 0; j + 1 < ts.size(); ++j) {
      const double t0 = ts[j];
      const double t1 = ts[j + 1];
      if (t1 <= t0) continue;
      const double tm = 0.5 * (t0 + t1);
      const Point mid{a.x + tm * (b.x - a.x), a.y + tm * (b.y - a.y)};
      CellId id;
      try {
        id = area.cell_lookup(mid.x, mid.y);
      } catch (const ValidationError&) {
        continue;  // piece lies outside the mask
      }
      acc[id] += (t1 - t0) * seg_len;
    }
  }
  return {acc.begin(), acc.end()};
}

}  // namespace airgrid
