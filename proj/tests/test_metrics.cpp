#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "glyph/raster.hpp"
#include "glyph/util.hpp"

using namespace glyph;

namespace {

RasterImage random_image(Rng& rng, int h, int w) {
    RasterImage img(h, w);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& p : img.pixels) p = u(rng);
    return img;
}

// Direct 2D-window reference SSIM: non-separable convolution, same
// 11x11 Gaussian (sigma 1.5), valid windows only.
double ssim_reference(const RasterImage& a, const RasterImage& b) {
    const double C1 = 1e-4, C2 = 9e-4;
    double k1d[11], ksum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double x = i - 5.0;
        k1d[i] = std::exp(-x * x / 4.5);
        ksum += k1d[i];
    }
    for (double& v : k1d) v /= ksum;
    double total = 0.0;
    int count = 0;
    for (int r = 0; r + 11 <= a.height; ++r)
        for (int c = 0; c + 11 <= a.width; ++c) {
            double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    const double w = k1d[i] * k1d[j];
                    const double pa = a.at(r + i, c + j), pb = b.at(r + i, c + j);
                    ma += w * pa;
                    mb += w * pb;
                    maa += w * pa * pa;
                    mbb += w * pb * pb;
                    mab += w * pa * pb;
                }
            const double va = maa - ma * ma, vb = mbb - mb * mb, cov = mab - ma * mb;
            total += ((2 * ma * mb + C1) * (2 * cov + C2)) /
                     ((ma * ma + mb * mb + C1) * (va + vb + C2));
            ++count;
        }
    return total / count;
}

}  // namespace

TEST_CASE("ssim of an image with itself is exactly 1") {
    Rng rng = make_rng(31);
    const RasterImage img = random_image(rng, 24, 24);
    CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim of constant 0 vs constant 1 has the closed form C1/(1+C1)") {
    const RasterImage zeros(16, 16, 0.0), ones(16, 16, 1.0);
    const double expected = 1e-4 / (1.0 + 1e-4);
    CHECK(std::abs(ssim(zeros, ones) - expected) < 1e-8);
}

TEST_CASE("ssim matches a direct 2D-window reference on random images") {
    Rng rng = make_rng(32);
    for (int t = 0; t < 5; ++t) {
        const RasterImage a = random_image(rng, 20, 25);
        const RasterImage b = random_image(rng, 20, 25);
        CHECK(ssim(a, b) == doctest::Approx(ssim_reference(a, b)).epsilon(1e-10));
    }
}

TEST_CASE("ssim is symmetric and at most 1") {
    Rng rng = make_rng(33);
    for (int t = 0; t < 10; ++t) {
        const RasterImage a = random_image(rng, 16, 16);
        const RasterImage b = random_image(rng, 16, 16);
        const double s = ssim(a, b);
        CHECK(s == doctest::Approx(ssim(b, a)).epsilon(1e-12));
        CHECK(s <= 1.0 + 1e-12);
    }
}

TEST_CASE("ssim input validation") {
    const RasterImage a(16, 16, 0.5), b(16, 17, 0.5), tiny(8, 8, 0.5);
    CHECK_THROWS_AS(ssim(a, b), std::invalid_argument);
    CHECK_THROWS_AS(ssim(tiny, tiny), std::invalid_argument);
}

TEST_CASE("l1 metric closed forms on the 255 scale") {
    const RasterImage zeros(4, 4, 0.0), ones(4, 4, 1.0);
    CHECK(l1_metric(zeros, ones) == doctest::Approx(255.0));
    CHECK(l1_metric(ones, zeros) == doctest::Approx(255.0));
    CHECK(l1_metric(zeros, zeros) == 0.0);
    RasterImage half(4, 4, 0.0);
    half.at(0, 0) = 1.0;
    CHECK(l1_metric(zeros, half) == doctest::Approx(255.0 / 16.0));
    CHECK_THROWS_AS(l1_metric(zeros, RasterImage(4, 5, 0.0)), std::invalid_argument);
}

TEST_CASE("compare_images bundles both metrics") {
    Rng rng = make_rng(34);
    const RasterImage a = random_image(rng, 16, 16);
    const RasterImage b = random_image(rng, 16, 16);
    const MetricReport rep = compare_images(a, b);
    CHECK(rep.ssim == doctest::Approx(ssim(a, b)));
    CHECK(rep.l1 == doctest::Approx(l1_metric(a, b)));
}
