#include "glyph/contour.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace glyph {

double polygon_area(const std::vector<Point2>& pts) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point2& a = pts[i];
        const Point2& b = pts[(i + 1) % pts.size()];
        acc += a.x * b.y - b.x * a.y;
    }
    return 0.5 * acc;
}

namespace {

struct Grid {
    int n;
    double coord(int k) const { return -1.0 + 2.0 * k / (n - 1); }
};

// Edge ids: horizontal (r,c)-(r,c+1) first, then vertical (r,c)-(r+1,c).
struct EdgeIndex {
    int n;
    std::size_t h_total() const { return static_cast<std::size_t>(n) * (n - 1); }
    std::size_t total() const { return 2 * h_total(); }
    std::size_t horiz(int r, int c) const { return static_cast<std::size_t>(r) * (n - 1) + c; }
    std::size_t vert(int r, int c) const { return h_total() + static_cast<std::size_t>(r) * n + c; }
};

}  // namespace

ContourSet extract_contours(const GlyphShapeParams& params, int grid_res, double w_min) {
    if (grid_res < 8) throw std::invalid_argument("extract_contours: grid_res must be >= 8");

    bool any_active = false;
    for (double w : params.W)
        if (w >= w_min) any_active = true;
    if (!any_active) return {};  // empty shape, nothing to trace

    const Grid g{grid_res};
    const int n = grid_res;
    std::vector<double> val(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double f = hard_field(params, {g.coord(c), g.coord(r)}, w_min);
            // Force the outermost ring outside so every contour closes;
            // shapes crossing the domain border get clipped.
            if (r == 0 || c == 0 || r == n - 1 || c == n - 1) f = std::max(f, 1.0);
            val[static_cast<std::size_t>(r) * n + c] = f;
        }
    }
    auto inside = [&](int r, int c) { return val[static_cast<std::size_t>(r) * n + c] <= 0.0; };
    auto value = [&](int r, int c) { return val[static_cast<std::size_t>(r) * n + c]; };

    const EdgeIndex ei{n};
    std::vector<Point2> cross(ei.total());
    std::vector<char> has_cross(ei.total(), 0);
    std::vector<std::array<std::int64_t, 2>> adj(ei.total(), {-1, -1});

    auto crossing = [&](std::size_t edge, int r0, int c0, int r1, int c1) {
        if (!has_cross[edge]) {
            const double a = value(r0, c0), b = value(r1, c1);
            const double t = a / (a - b);
            cross[edge] = {g.coord(c0) + t * (g.coord(c1) - g.coord(c0)),
                           g.coord(r0) + t * (g.coord(r1) - g.coord(r0))};
            has_cross[edge] = 1;
        }
        return edge;
    };
    auto link = [&](std::size_t ea, std::size_t eb) {
        auto& a = adj[ea];
        auto& b = adj[eb];
        (a[0] < 0 ? a[0] : a[1]) = static_cast<std::int64_t>(eb);
        (b[0] < 0 ? b[0] : b[1]) = static_cast<std::int64_t>(ea);
    };

    for (int r = 0; r + 1 < n; ++r) {
        for (int c = 0; c + 1 < n; ++c) {
            const bool tl = inside(r, c), tr = inside(r, c + 1);
            const bool br = inside(r + 1, c + 1), bl = inside(r + 1, c);
            const int code = (tl ? 1 : 0) | (tr ? 2 : 0) | (br ? 4 : 0) | (bl ? 8 : 0);
            if (code == 0 || code == 15) continue;

            auto top = [&] { return crossing(ei.horiz(r, c), r, c, r, c + 1); };
            auto bottom = [&] { return crossing(ei.horiz(r + 1, c), r + 1, c, r + 1, c + 1); };
            auto left = [&] { return crossing(ei.vert(r, c), r, c, r + 1, c); };
            auto right = [&] { return crossing(ei.vert(r, c + 1), r, c + 1, r + 1, c + 1); };

            switch (code) {
                case 1: case 14: link(top(), left()); break;
                case 2: case 13: link(top(), right()); break;
                case 4: case 11: link(right(), bottom()); break;
                case 8: case 7:  link(bottom(), left()); break;
                case 3: case 12: link(left(), right()); break;
                case 6: case 9:  link(top(), bottom()); break;
                case 5: case 10: {
                    // Saddle: disambiguate with a center sample.
                    const Point2 center{0.5 * (g.coord(c) + g.coord(c + 1)),
                                        0.5 * (g.coord(r) + g.coord(r + 1))};
                    const bool center_in = hard_field(params, center, w_min) <= 0.0;
                    // Inside center joins the two inside corners across the cell.
                    const bool join = (code == 5) ? center_in : !center_in;
                    if (join) { link(top(), right()); link(bottom(), left()); }
                    else      { link(top(), left());  link(right(), bottom()); }
                    break;
                }
                default: break;
            }
        }
    }

    ContourSet result;
    std::vector<char> visited(ei.total(), 0);
    for (std::size_t e = 0; e < ei.total(); ++e) {
        if (visited[e] || adj[e][0] < 0 || adj[e][1] < 0) continue;
        std::vector<Point2> poly;
        std::int64_t prev = -1;
        std::int64_t cur = static_cast<std::int64_t>(e);
        while (true) {
            visited[cur] = 1;
            poly.push_back(cross[cur]);
            const std::int64_t next = (adj[cur][0] == prev) ? adj[cur][1] : adj[cur][0];
            prev = cur;
            cur = next;
            if (cur < 0 || cur == static_cast<std::int64_t>(e)) break;
        }
        if (poly.size() < 3) continue;
        Contour contour;
        contour.points = std::move(poly);
        contour.winding = polygon_area(contour.points) > 0.0 ? Winding::CounterClockwise
                                                             : Winding::Clockwise;
        result.contours.push_back(std::move(contour));
    }
    return result;
}

std::string export_svg(const ContourSet& contours, double view_size) {
    std::ostringstream path;
    path.precision(6);
    path << std::fixed;
    auto map = [&](double u) { return (u + 1.0) * 0.5 * view_size; };
    for (const Contour& c : contours.contours) {
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            path << (i == 0 ? "M" : "L") << map(c.points[i].x) << ' ' << map(c.points[i].y);
        }
        path << "Z";
    }
    std::ostringstream doc;
    doc << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << view_size
        << "\" height=\"" << view_size << "\" viewBox=\"0 0 " << view_size << ' ' << view_size
        << "\">\n"
        << "  <path d=\"" << path.str() << "\" fill=\"#000000\" fill-rule=\"evenodd\"/>\n"
        << "</svg>\n";
    return doc.str();
}

}  // namespace glyph
