#pragma once

#include <string>
#include <vector>

#include "glyph/kernel.hpp"

namespace glyph {

enum class Winding { Clockwise, CounterClockwise };

struct Contour {
    std::vector<Point2> points;  // closed: last vertex connects to first
    Winding winding = Winding::CounterClockwise;
};

struct ContourSet {
    std::vector<Contour> contours;
    bool empty() const { return contours.empty(); }
};

// Shoelace signed area (positive = counter-clockwise in y-down coords).
double polygon_area(const std::vector<Point2>& pts);

// Marching squares over the sigma-corrected, W-filtered hard field,
// sampled on a grid_res x grid_res lattice spanning [-1,1]^2. Edge
// crossings are linearly interpolated; ambiguous saddle cells are
// resolved with a cell-center field sample. An empty shape yields an
// empty set.
ContourSet extract_contours(const GlyphShapeParams& params, int grid_res,
                            double w_min = 0.5);

// SVG 1.1 document with a single even-odd filled path; normalized
// coordinates are mapped to [0, view_size]^2.
std::string export_svg(const ContourSet& contours, double view_size);

}  // namespace glyph
