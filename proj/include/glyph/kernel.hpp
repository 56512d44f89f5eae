#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace glyph {

// Normalized image coordinates: x,y in [-1,1] nominally, y grows downward.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// One quadratic curve a*x^2 + b*x*y + c*y^2 + d*x + e*y + f.
// The algebraic value serves as a pseudo signed distance: <= 0 inside.
struct CurveParams {
    double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
};

// Full implicit shape: v primitives, each enclosed by p curves.
//   P     : v*p curves, 6 coefficients each, layout [i*p*6 + j*6 + k]
//   sigma : v*p per-curve scale/orientation factors
//   W     : v primitive weights (regularized toward 1 during training)
struct GlyphShapeParams {
    int v = 0;
    int p = 0;
    std::vector<double> P;
    std::vector<double> sigma;
    std::vector<double> W;

    static GlyphShapeParams zeros(int v, int p);

    std::span<const double> curve(int i, int j) const {
        return {P.data() + (static_cast<std::size_t>(i) * p + j) * 6, 6};
    }
    std::span<double> curve(int i, int j) {
        return {P.data() + (static_cast<std::size_t>(i) * p + j) * 6, 6};
    }
};

// Quadratic monomial basis [x^2, xy, y^2, x, y, 1] at pt.
void curve_basis(Point2 pt, double out[6]);

double eval_curve(const CurveParams& curve, Point2 pt);
double eval_curve(std::span<const double> coeffs, Point2 pt);

// Hard primitive: max over curve values; <= 0 iff pt lies in the
// intersection of all negative half-regions.
double eval_primitive_hard(std::span<const double> curves, Point2 pt);

// Hard shape: min over primitives of eval_primitive_hard on raw curve
// coefficients (sigma and W are ignored); <= 0 iff inside the union.
double eval_shape_hard(const GlyphShapeParams& params, Point2 pt);

// Soft primitive: sum_j ReLU(sigma_ij * d_ij); 0 inside, > 0 outside.
double eval_primitive_soft(std::span<const double> curves,
                           std::span<const double> sigma_row, Point2 pt);

// Soft shape: 1 - clamp(sum_i W_i * (1 - Dplus_i), 0, 1).
// Not a distance; an approximate occupancy in [0,1], 0 = inside.
double eval_shape_soft(const GlyphShapeParams& params, Point2 pt);

// Hard field recovered from trained soft parameters: primitives with
// W_i < w_min are dropped, each curve is scaled by sigma to fix
// orientation. Used by hard rendering and contour extraction.
// Throws std::domain_error if no primitive survives the filter.
double hard_field(const GlyphShapeParams& params, Point2 pt, double w_min);

bool occupancy_hard(const GlyphShapeParams& params, Point2 pt, double w_min);

}  // namespace glyph
