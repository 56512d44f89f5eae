#pragma once

#include <string>
#include <vector>

#include "glyph/kernel.hpp"

namespace glyph {

// Grayscale image, values in [0,1], row-major. Ink (glyph interior) is 0,
// background is 1.
struct RasterImage {
    int height = 0;
    int width = 0;
    std::vector<double> pixels;

    RasterImage() = default;
    RasterImage(int h, int w, double fill = 1.0)
        : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
};

// 8-bit binary PGM (P5, maxval 255). Throws std::runtime_error naming the
// violation on malformed input.
RasterImage load_pgm(const std::string& path);
void save_pgm(const RasterImage& img, const std::string& path);

// Serialized canonical P5 bytes (what save_pgm writes).
std::string pgm_bytes(const RasterImage& img);
RasterImage parse_pgm(const std::string& bytes);

// Pixel center (r,c) of an HxW grid mapped to [-1,1]^2, y down.
Point2 pixel_to_coord(int r, int c, int H, int W);

RasterImage render_soft(const GlyphShapeParams& params, int H, int W);
RasterImage render_hard(const GlyphShapeParams& params, int H, int W, double w_min = 0.5);

// Box-filter downsample; H, W must be multiples of the target size.
RasterImage downsample(const RasterImage& img, int H, int W);

// Binary threshold: pixel < thresh -> 0 (ink), else 1.
RasterImage threshold(const RasterImage& img, double thresh = 0.5);

struct MetricReport {
    double ssim = 0.0;
    double l1 = 0.0;
};

// Mean local SSIM, 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03,
// dynamic range 1.0, valid-window coverage.
double ssim(const RasterImage& a, const RasterImage& b);

// Mean absolute pixel difference on the 0-255 scale.
double l1_metric(const RasterImage& a, const RasterImage& b);

MetricReport compare_images(const RasterImage& a, const RasterImage& b);

}  // namespace glyph
