#pragma once

#include <cstdint>
#include <string>

#include "glyph/raster.hpp"

namespace glyph {

// Procedural sans-serif glyph generator. Letters are stroke skeletons
// (polylines, arcs sampled to polylines) rendered with a round pen; a
// small style space (stroke width, slant, x/y scale) yields families of
// consistent fonts for dataset-scale experiments.
struct FontStyle {
    double stroke_width = 0.10;  // pen diameter, unit em box
    double slant = 0.0;          // horizontal shear per unit height
    double width_scale = 1.0;
    double height_scale = 1.0;
};

// letter in 'A'..'Z'; size x size image, ink = 0, lightly antialiased.
RasterImage render_letter(char letter, const FontStyle& style, int size);

// Deterministic style family member (index 0 is the plain default).
FontStyle font_style_variant(int index);

// Writes <root>/<font>/<A..Z>.pgm for n_fonts style variants plus an
// index.txt with train/validation split lines. Returns the index path.
std::string write_dataset(const std::string& root, int n_fonts, int size,
                          int validation_fonts = 0);

}  // namespace glyph
