#include "glyph/kernel.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace glyph {

GlyphShapeParams GlyphShapeParams::zeros(int v, int p) {
    if (v < 1 || p < 1) throw std::invalid_argument("GlyphShapeParams: v and p must be >= 1");
    GlyphShapeParams s;
    s.v = v;
    s.p = p;
    s.P.assign(static_cast<std::size_t>(v) * p * 6, 0.0);
    s.sigma.assign(static_cast<std::size_t>(v) * p, 0.0);
    s.W.assign(static_cast<std::size_t>(v), 0.0);
    return s;
}

void curve_basis(Point2 pt, double out[6]) {
    out[0] = pt.x * pt.x;
    out[1] = pt.x * pt.y;
    out[2] = pt.y * pt.y;
    out[3] = pt.x;
    out[4] = pt.y;
    out[5] = 1.0;
}

double eval_curve(std::span<const double> coeffs, Point2 pt) {
    double q[6];
    curve_basis(pt, q);
    double s = 0.0;
    for (int k = 0; k < 6; ++k) s += q[k] * coeffs[k];
    return s;
}

double eval_curve(const CurveParams& curve, Point2 pt) {
    const double c[6] = {curve.a, curve.b, curve.c, curve.d, curve.e, curve.f};
    return eval_curve(std::span<const double>(c, 6), pt);
}

double eval_primitive_hard(std::span<const double> curves, Point2 pt) {
    const std::size_t p = curves.size() / 6;
    if (p == 0) throw std::invalid_argument("eval_primitive_hard: need at least one curve");
    double q[6];
    curve_basis(pt, q);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p; ++j) {
        double d = 0.0;
        for (int k = 0; k < 6; ++k) d += q[k] * curves[j * 6 + k];
        best = std::max(best, d);
    }
    return best;
}

double eval_shape_hard(const GlyphShapeParams& params, Point2 pt) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < params.v; ++i) {
        const std::span<const double> row{params.P.data() + static_cast<std::size_t>(i) * params.p * 6,
                                          static_cast<std::size_t>(params.p) * 6};
        best = std::min(best, eval_primitive_hard(row, pt));
    }
    return best;
}

double eval_primitive_soft(std::span<const double> curves,
                           std::span<const double> sigma_row, Point2 pt) {
    const std::size_t p = curves.size() / 6;
    double q[6];
    curve_basis(pt, q);
    double acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double d = 0.0;
        for (int k = 0; k < 6; ++k) d += q[k] * curves[j * 6 + k];
        const double sd = sigma_row[j] * d;
        if (sd > 0.0) acc += sd;
    }
    return acc;
}

double eval_shape_soft(const GlyphShapeParams& params, Point2 pt) {
    double q[6];
    curve_basis(pt, q);
    double s = 0.0;
    for (int i = 0; i < params.v; ++i) {
        double dplus = 0.0;
        const double* curves = params.P.data() + static_cast<std::size_t>(i) * params.p * 6;
        const double* sig = params.sigma.data() + static_cast<std::size_t>(i) * params.p;
        for (int j = 0; j < params.p; ++j) {
            double d = 0.0;
            for (int k = 0; k < 6; ++k) d += q[k] * curves[j * 6 + k];
            const double sd = sig[j] * d;
            if (sd > 0.0) dplus += sd;
        }
        s += params.W[i] * (1.0 - dplus);
    }
    const double clamped = std::clamp(s, 0.0, 1.0);
    return 1.0 - clamped;
}

double hard_field(const GlyphShapeParams& params, Point2 pt, double w_min) {
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int i = 0; i < params.v; ++i) {
        if (params.W[i] < w_min) continue;
        any = true;
        const double* curves = params.P.data() + static_cast<std::size_t>(i) * params.p * 6;
        const double* sig = params.sigma.data() + static_cast<std::size_t>(i) * params.p;
        double q[6];
        curve_basis(pt, q);
        double prim = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < params.p; ++j) {
            double d = 0.0;
            for (int k = 0; k < 6; ++k) d += q[k] * curves[j * 6 + k];
            prim = std::max(prim, sig[j] * d);
        }
        best = std::min(best, prim);
    }
    if (!any) throw std::domain_error("hard_field: no primitive with W >= w_min (degenerate shape)");
    return best;
}

bool occupancy_hard(const GlyphShapeParams& params, Point2 pt, double w_min) {
    return hard_field(params, pt, w_min) <= 0.0;
}

}  // namespace glyph
