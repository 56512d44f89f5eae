#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyph/kernel.hpp"
#include "glyph/raster.hpp"
#include "glyph/util.hpp"

namespace glyph {

struct Sample {
    Point2 pt;
    double target = 1.0;  // pixel value: 0 ink, 1 background
};

using SampleBatch = std::vector<Sample>;

// Gradients shaped like GlyphShapeParams.
struct ShapeGrad {
    std::vector<double> P;
    std::vector<double> sigma;
    std::vector<double> W;

    static ShapeGrad zeros(int v, int p);
    void add(const ShapeGrad& other);
};

// Closest approach to a subgradient kink seen during an evaluation, used
// by finite-difference checks to skip ill-conditioned instances.
// relu_arg:    min |sigma_ij * d_ij|
// clamp_margin: min over samples of dist(s, {0, 1})
// w_margin:    min |W_i - 1|
struct KinkDistances {
    double relu_arg = 1e300;
    double clamp_margin = 1e300;
    double w_margin = 1e300;
    double min() const;
};

double loss_rec(const GlyphShapeParams& params, const SampleBatch& batch);
double loss_w(std::span<const double> W);
double total_loss(const GlyphShapeParams& params, const SampleBatch& batch, double lambda_w);

// Fused forward/backward: returns loss_rec and accumulates d(loss_rec)/d(P,
// sigma, W) into grad. Accumulation order is fixed (chunked reduction), so
// results are bit-reproducible for any worker count.
double loss_rec_grad(const GlyphShapeParams& params, const SampleBatch& batch,
                     ShapeGrad& grad, KinkDistances* kinks = nullptr);

// loss_rec + lambda_w * loss_w with the |W-1| subgradient folded in.
double total_loss_grad(const GlyphShapeParams& params, const SampleBatch& batch,
                       double lambda_w, ShapeGrad& grad, KinkDistances* kinks = nullptr);

// n pixel centers drawn uniformly without replacement; n == H*W gives the
// full grid in row-major order.
SampleBatch make_batch(const RasterImage& img, int n, std::uint64_t seed);

// Initialization families. Detectors is the default: every primitive
// starts from the same set of background detector curves, constructed by
// a greedy cover (each round fits one quadratic separating the largest
// still-uncovered background component from the ink, choosing among
// least-squares fits, half-planes, slab complements, and component
// ellipses) followed by hinge-margin refinement of the curve set against
// the pixel grid. In that configuration each primitive's hard region
// coincides with the ink, the soft sum is strongly positive on ink and
// strongly negative on background, and W sits at 1, so the hard and soft
// fields agree from the first iteration. Gaussian starts from near-zero
// random curves; it reconstructs well under long optimization but settles
// into solutions whose soft sum relies on cancellation between
// primitives, leaving a degenerate hard field.
enum class FitInit { Gaussian, Disks, Detectors };

struct FitConfig {
    int v = 16;
    int p = 6;
    int iterations = 20000;
    int batch_size = 0;        // 0 = full pixel grid every iteration
    double lambda_w = 0.1;
    double lr = 1e-4;
    std::uint64_t seed = 0;
    FitInit init = FitInit::Detectors;  // falls back to Gaussian without ink
    double init_scale_linear = 0.1;   // linear + constant coefficients (Gaussian)
    double init_scale_quad = 0.02;    // quadratic coefficients (Gaussian)
    double init_scale_w = 0.02;       // W spread around init_w_mean
    double init_w_mean = 0.0;         // Gaussian/Disks keep the clamp unsaturated at 0
    double init_sigma = 16.0;         // sharpens the soft boundary at init
    double init_jitter = 0.0;         // relative coefficient noise (Detectors)
    double sigma_floor = 0.05;        // projection keeping sigma positive (0 disables)
};

struct TraceRow {
    int iteration = 0;
    double rec = 0.0;
    double w = 0.0;
    double total = 0.0;
};

struct FitResult {
    GlyphShapeParams params;
    std::vector<TraceRow> trace;
    bool diverged = false;  // non-finite loss encountered; params at last finite state
};

// Seeded random initialization used by fit_glyph and the auto-decoder.
// When img is given, primitive centers are drawn from its ink pixels.
GlyphShapeParams init_shape_params(const FitConfig& cfg, Rng& rng,
                                   const RasterImage* img = nullptr);

FitResult fit_glyph(const RasterImage& img, const FitConfig& cfg);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace glyph
