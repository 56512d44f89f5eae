#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "glyph/raster.hpp"
#include "glyph/synthfont.hpp"

using namespace glyph;

namespace {

int ink_count(const RasterImage& img) {
    int n = 0;
    for (double p : img.pixels)
        if (p < 0.5) ++n;
    return n;
}

double ink_centroid_x(const RasterImage& img, int row_begin, int row_end) {
    double sum = 0.0;
    int n = 0;
    for (int r = row_begin; r < row_end; ++r)
        for (int c = 0; c < img.width; ++c)
            if (img.at(r, c) < 0.5) { sum += c; ++n; }
    return n == 0 ? -1.0 : sum / n;
}

}  // namespace

TEST_CASE("letters render with ink on a background of 1") {
    for (char ch = 'A'; ch <= 'Z'; ++ch) {
        RasterImage img = render_letter(ch, FontStyle{}, 64);
        CHECK(img.width == 64);
        CHECK(img.height == 64);
        for (double p : img.pixels) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
        CHECK(ink_count(img) > 50);
        // Corners stay background.
        CHECK(img.at(0, 0) == 1.0);
        CHECK(img.at(63, 63) == 1.0);
    }
    CHECK_THROWS_AS(render_letter('a', FontStyle{}, 64), std::invalid_argument);
    CHECK_THROWS_AS(render_letter('1', FontStyle{}, 64), std::invalid_argument);
}

TEST_CASE("the letter O encloses a background hole") {
    RasterImage img = render_letter('O', FontStyle{}, 64);
    CHECK(img.at(32, 32) == 1.0);     // counter
    CHECK(img.at(32, 12) < 0.5);      // left bowl stroke
}

TEST_CASE("stroke width controls ink coverage") {
    FontStyle thin;
    thin.stroke_width = 0.06;
    FontStyle thick;
    thick.stroke_width = 0.16;
    CHECK(ink_count(render_letter('H', thin, 64)) <
          ink_count(render_letter('H', thick, 64)));
}

TEST_CASE("slant shears the top of the glyph") {
    FontStyle right;
    right.slant = 0.2;
    RasterImage plain = render_letter('I', FontStyle{}, 64);
    RasterImage slanted = render_letter('I', right, 64);
    // slant > 0 shifts points above the midline toward +x.
    CHECK(ink_centroid_x(slanted, 0, 16) > ink_centroid_x(plain, 0, 16) + 2.0);
    CHECK(ink_centroid_x(slanted, 48, 64) < ink_centroid_x(plain, 48, 64) - 2.0);
}

TEST_CASE("width scale narrows the glyph around its center") {
    FontStyle narrow;
    narrow.width_scale = 0.7;
    RasterImage plain = render_letter('H', FontStyle{}, 64);
    RasterImage squeezed = render_letter('H', narrow, 64);
    auto width_of = [](const RasterImage& img) {
        int lo = img.width, hi = -1;
        for (int r = 0; r < img.height; ++r)
            for (int c = 0; c < img.width; ++c)
                if (img.at(r, c) < 0.5) { lo = std::min(lo, c); hi = std::max(hi, c); }
        return hi - lo;
    };
    CHECK(width_of(squeezed) < width_of(plain));
}

TEST_CASE("style variant 0 is the plain default and variants differ") {
    const FontStyle v0 = font_style_variant(0);
    CHECK(v0.stroke_width == FontStyle{}.stroke_width);
    CHECK(v0.slant == FontStyle{}.slant);
    CHECK(v0.width_scale == FontStyle{}.width_scale);
    CHECK(v0.height_scale == FontStyle{}.height_scale);

    // Deterministic and non-degenerate across a family.
    for (int k = 0; k < 20; ++k) {
        const FontStyle a = font_style_variant(k);
        const FontStyle b = font_style_variant(k);
        CHECK(a.stroke_width == b.stroke_width);
        CHECK(a.slant == b.slant);
        CHECK(a.stroke_width > 0.0);
        CHECK(a.width_scale > 0.0);
    }
    const FontStyle v1 = font_style_variant(1);
    CHECK(v1.stroke_width != v0.stroke_width);
    CHECK_THROWS_AS(font_style_variant(-1), std::invalid_argument);
}

TEST_CASE("write_dataset lays out fonts, glyphs and the split index") {
    namespace fs = std::filesystem;
    const std::string root = "synthfont_test_ds";
    const std::string index = write_dataset(root, 3, 16, 1);
    CHECK(fs::path(index).filename() == "index.txt");

    std::ifstream f(index);
    REQUIRE(f.good());
    std::string split, name;
    int train = 0, validation = 0;
    while (f >> split >> name) {
        CHECK((split == "train" || split == "validation"));
        (split == "train" ? train : validation) += 1;
        for (char ch = 'A'; ch <= 'Z'; ++ch)
            CHECK(fs::exists(fs::path(root) / name / (std::string(1, ch) + ".pgm")));
    }
    CHECK(train == 2);
    CHECK(validation == 1);

    RasterImage a = load_pgm((fs::path(root) / "synth00" / "A.pgm").string());
    CHECK(a.width == 16);
    CHECK(ink_count(a) > 0);

    CHECK_THROWS_AS(write_dataset(root, 0, 16, 0), std::invalid_argument);
    CHECK_THROWS_AS(write_dataset(root, 2, 16, 2), std::invalid_argument);
    fs::remove_all(root);
}
