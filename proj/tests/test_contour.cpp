#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "glyph/contour.hpp"
#include "glyph/kernel.hpp"

using namespace glyph;

namespace {

void set_disk(std::span<double> c, double cx, double cy, double r) {
    c[0] = 1.0; c[1] = 0.0; c[2] = 1.0;
    c[3] = -2.0 * cx; c[4] = -2.0 * cy;
    c[5] = cx * cx + cy * cy - r * r;
}

void negate(std::span<double> c) {
    for (double& v : c) v = -v;
}

GlyphShapeParams disk_params(double cx, double cy, double r) {
    GlyphShapeParams p = GlyphShapeParams::zeros(1, 1);
    set_disk(p.curve(0, 0), cx, cy, r);
    p.sigma = {1.0};
    p.W = {1.0};
    return p;
}

// Even-odd point-in-set test straight from the definition: parity of
// ray crossings, independent of the marching-squares code under test.
bool even_odd_inside(const ContourSet& cs, Point2 pt) {
    int crossings = 0;
    for (const Contour& c : cs.contours) {
        const std::size_t m = c.points.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Point2& a = c.points[i];
            const Point2& b = c.points[(i + 1) % m];
            if ((a.y > pt.y) == (b.y > pt.y)) continue;
            const double t = (pt.y - a.y) / (b.y - a.y);
            if (a.x + t * (b.x - a.x) > pt.x) ++crossings;
        }
    }
    return (crossings % 2) == 1;
}

double iou_vs_hard(const ContourSet& cs, const GlyphShapeParams& params, int res) {
    std::size_t inter = 0, uni = 0;
    for (int r = 0; r < res; ++r)
        for (int c = 0; c < res; ++c) {
            const Point2 pt{-1.0 + 2.0 * (c + 0.5) / res, -1.0 + 2.0 * (r + 0.5) / res};
            const bool a = even_odd_inside(cs, pt);
            const bool b = occupancy_hard(params, pt, 0.5);
            if (a && b) ++inter;
            if (a || b) ++uni;
        }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

}  // namespace

TEST_CASE("shoelace area of simple polygons") {
    // Unit square traversed +x then +y (counter-clockwise in y-down coords).
    std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(polygon_area(sq) == doctest::Approx(1.0));
    std::vector<Point2> rev(sq.rbegin(), sq.rend());
    CHECK(polygon_area(rev) == doctest::Approx(-1.0));
    std::vector<Point2> tri{{0, 0}, {4, 0}, {0, 3}};
    CHECK(polygon_area(tri) == doctest::Approx(6.0));
}

TEST_CASE("disk contour: single loop on the circle with the right area") {
    const double r = 0.6;
    GlyphShapeParams params = disk_params(0.1, -0.05, r);
    ContourSet cs = extract_contours(params, 256);
    REQUIRE(cs.contours.size() == 1);
    const auto& pts = cs.contours[0].points;
    REQUIRE(pts.size() > 50);
    for (const Point2& pt : pts) {
        const double d = std::hypot(pt.x - 0.1, pt.y + 0.05);
        CHECK(std::abs(d - r) < 0.01);
    }
    CHECK(std::abs(polygon_area(pts)) ==
          doctest::Approx(std::numbers::pi * r * r).epsilon(0.01));
}

TEST_CASE("annulus: two contours, opposite winding, correct areas") {
    const double R = 0.7, r = 0.3;
    GlyphShapeParams params = GlyphShapeParams::zeros(1, 2);
    set_disk(params.curve(0, 0), 0.0, 0.0, R);
    set_disk(params.curve(0, 1), 0.0, 0.0, r);
    negate(params.curve(0, 1));  // inside of the ring = outside the small disk
    params.sigma = {1.0, 1.0};
    params.W = {1.0};

    ContourSet cs = extract_contours(params, 256);
    REQUIRE(cs.contours.size() == 2);
    double a0 = polygon_area(cs.contours[0].points);
    double a1 = polygon_area(cs.contours[1].points);
    if (std::abs(a0) < std::abs(a1)) std::swap(a0, a1);
    CHECK(std::abs(a0) == doctest::Approx(std::numbers::pi * R * R).epsilon(0.01));
    CHECK(std::abs(a1) == doctest::Approx(std::numbers::pi * r * r).epsilon(0.01));
    // Winding records the traversal orientation (even-odd fill ignores it).
    for (const Contour& c : cs.contours) {
        const Winding expect = polygon_area(c.points) > 0.0 ? Winding::CounterClockwise
                                                            : Winding::Clockwise;
        CHECK(c.winding == expect);
    }
}

TEST_CASE("union of two disks gives one contour per component") {
    GlyphShapeParams params = GlyphShapeParams::zeros(2, 1);
    set_disk(params.curve(0, 0), -0.5, 0.0, 0.3);
    set_disk(params.curve(1, 0), 0.5, 0.0, 0.3);
    params.sigma = {1.0, 1.0};
    params.W = {1.0, 1.0};
    ContourSet cs = extract_contours(params, 256);
    CHECK(cs.contours.size() == 2);
}

TEST_CASE("primitives below the weight threshold are dropped") {
    GlyphShapeParams params = GlyphShapeParams::zeros(2, 1);
    set_disk(params.curve(0, 0), -0.5, 0.0, 0.3);
    set_disk(params.curve(1, 0), 0.5, 0.0, 0.3);
    params.sigma = {1.0, 1.0};
    params.W = {1.0, 0.2};
    ContourSet cs = extract_contours(params, 256);
    CHECK(cs.contours.size() == 1);
    // All-inactive shape is empty rather than an error.
    params.W = {0.1, 0.2};
    CHECK(extract_contours(params, 256).empty());
}

TEST_CASE("contour grid must be reasonably fine") {
    GlyphShapeParams params = disk_params(0.0, 0.0, 0.5);
    CHECK_THROWS_AS(extract_contours(params, 7), std::invalid_argument);
    CHECK_NOTHROW(extract_contours(params, 8));
}

TEST_CASE("even-odd fill of the contours matches the hard occupancy") {
    GlyphShapeParams disk = disk_params(0.2, 0.1, 0.55);
    CHECK(iou_vs_hard(extract_contours(disk, 512), disk, 256) > 0.98);

    GlyphShapeParams ring = GlyphShapeParams::zeros(1, 2);
    set_disk(ring.curve(0, 0), 0.0, 0.0, 0.7);
    set_disk(ring.curve(0, 1), 0.0, 0.0, 0.35);
    negate(ring.curve(0, 1));
    ring.sigma = {1.0, 1.0};
    ring.W = {1.0};
    CHECK(iou_vs_hard(extract_contours(ring, 512), ring, 256) > 0.98);
}

TEST_CASE("sigma sign flips are honored by the recovered hard field") {
    // A negative sigma flips the curve's orientation; the contour should
    // trace the flipped shape (complement clipped to the domain).
    GlyphShapeParams params = GlyphShapeParams::zeros(1, 1);
    set_disk(params.curve(0, 0), 0.0, 0.0, 0.5);
    params.sigma = {-2.0};
    params.W = {1.0};
    ContourSet cs = extract_contours(params, 256);
    REQUIRE(!cs.empty());
    CHECK(even_odd_inside(cs, {0.9, 0.9}));
    CHECK(!even_odd_inside(cs, {0.0, 0.0}));
}

TEST_CASE("svg document structure and coordinate mapping") {
    ContourSet cs;
    Contour tri;
    tri.points = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}};
    cs.contours.push_back(tri);
    cs.contours.push_back(tri);
    const std::string svg = export_svg(cs, 100.0);
    CHECK(svg.find("<?xml version=\"1.0\"") == 0);
    CHECK(svg.find("viewBox=\"0 0 100 100\"") != std::string::npos);
    CHECK(svg.find("fill-rule=\"evenodd\"") != std::string::npos);
    CHECK(svg.find("M0.000000 0.000000") != std::string::npos);
    CHECK(svg.find("L100.000000 0.000000") != std::string::npos);
    CHECK(svg.find("L100.000000 100.000000") != std::string::npos);
    // One closed subpath per contour.
    std::size_t zs = 0, ms = 0;
    for (char ch : svg)
        if (ch == 'Z') ++zs;
    for (std::size_t k = svg.find("M"); k != std::string::npos; k = svg.find("M", k + 1)) ++ms;
    CHECK(zs == 2);
    CHECK(ms >= 2);
    // Empty set still yields a valid document with an empty path.
    const std::string empty_svg = export_svg(ContourSet{}, 64.0);
    CHECK(empty_svg.find("d=\"\"") != std::string::npos);
}
