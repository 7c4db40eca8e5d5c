#pragma once

#include <utility>
#include <vector>

#include "airgrid/grid.hpp"

namespace airgrid {

double point_segment_distance(Point p, Point a, Point b);
double point_polyline_distance(Point p, const std::vector<Point>& polyline);
double polyline_length(const std::vector<Point>& polyline);

// Length of polyline contained in each masked cell it touches. Every segment
// is cut at grid-line crossings and each piece is assigned to the cell owning
// its midpoint (half-open convention), so the pieces partition the polyline
// exactly; pieces whose midpoint falls outside the mask are dropped.
std::vector<std::pair<CellId, double>> clip_polyline_to_cells(
    const std::vector<Point>& polyline, const StudyArea& area);

}  // namespace airgrid
