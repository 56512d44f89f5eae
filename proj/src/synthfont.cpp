#include "glyph/synthfont.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace glyph {

namespace {

struct Seg {
    double x0, y0, x1, y1;
};

using Strokes = std::vector<Seg>;

void seg(Strokes& s, double x0, double y0, double x1, double y1) {
    s.push_back({x0, y0, x1, y1});
}

// Elliptical arc sampled as a polyline; angles in degrees, y-down frame.
void arc(Strokes& s, double cx, double cy, double rx, double ry,
         double a0, double a1, int steps = 24) {
    double px = 0, py = 0;
    for (int k = 0; k <= steps; ++k) {
        const double a = (a0 + (a1 - a0) * k / steps) * std::numbers::pi / 180.0;
        const double x = cx + rx * std::cos(a);
        const double y = cy + ry * std::sin(a);
        if (k > 0) seg(s, px, py, x, y);
        px = x;
        py = y;
    }
}

void poly(Strokes& s, std::initializer_list<double> xy) {
    auto it = xy.begin();
    double px = *it++;
    double py = *it++;
    while (it != xy.end()) {
        const double x = *it++;
        const double y = *it++;
        seg(s, px, py, x, y);
        px = x;
        py = y;
    }
}

Strokes letter_strokes(char letter) {
    Strokes s;
    switch (letter) {
        case 'A':
            poly(s, {0.15, 0.9, 0.5, 0.1, 0.85, 0.9});
            seg(s, 0.3, 0.62, 0.7, 0.62);
            break;
        case 'B':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.2, 0.1, 0.56, 0.1);
            arc(s, 0.56, 0.3, 0.2, 0.2, -90, 90);
            seg(s, 0.56, 0.5, 0.2, 0.5);
            seg(s, 0.2, 0.5, 0.58, 0.5);
            arc(s, 0.58, 0.7, 0.23, 0.2, -90, 90);
            seg(s, 0.58, 0.9, 0.2, 0.9);
            break;
        case 'C':
            arc(s, 0.52, 0.5, 0.34, 0.4, 45, 315);
            break;
        case 'D':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.2, 0.1, 0.5, 0.1);
            arc(s, 0.5, 0.5, 0.32, 0.4, -90, 90);
            seg(s, 0.5, 0.9, 0.2, 0.9);
            break;
        case 'E':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.2, 0.1, 0.8, 0.1);
            seg(s, 0.2, 0.5, 0.7, 0.5);
            seg(s, 0.2, 0.9, 0.8, 0.9);
            break;
        case 'F':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.2, 0.1, 0.8, 0.1);
            seg(s, 0.2, 0.5, 0.7, 0.5);
            break;
        case 'G':
            arc(s, 0.5, 0.5, 0.34, 0.4, 30, 330);
            seg(s, 0.84, 0.55, 0.55, 0.55);
            break;
        case 'H':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.8, 0.1, 0.8, 0.9);
            seg(s, 0.2, 0.5, 0.8, 0.5);
            break;
        case 'I':
            seg(s, 0.5, 0.1, 0.5, 0.9);
            seg(s, 0.35, 0.1, 0.65, 0.1);
            seg(s, 0.35, 0.9, 0.65, 0.9);
            break;
        case 'J':
            seg(s, 0.7, 0.1, 0.7, 0.68);
            arc(s, 0.5, 0.68, 0.2, 0.2, 0, 180);
            seg(s, 0.45, 0.1, 0.85, 0.1);
            break;
        case 'K':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.8, 0.1, 0.2, 0.55);
            seg(s, 0.42, 0.45, 0.8, 0.9);
            break;
        case 'L':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.2, 0.9, 0.8, 0.9);
            break;
        case 'M':
            poly(s, {0.15, 0.9, 0.15, 0.1, 0.5, 0.62, 0.85, 0.1, 0.85, 0.9});
            break;
        case 'N':
            poly(s, {0.2, 0.9, 0.2, 0.1, 0.8, 0.9, 0.8, 0.1});
            break;
        case 'O':
            arc(s, 0.5, 0.5, 0.33, 0.4, 0, 360, 40);
            break;
        case 'P':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.2, 0.1, 0.56, 0.1);
            arc(s, 0.56, 0.32, 0.23, 0.22, -90, 90);
            seg(s, 0.56, 0.54, 0.2, 0.54);
            break;
        case 'Q':
            arc(s, 0.5, 0.5, 0.33, 0.4, 0, 360, 40);
            seg(s, 0.58, 0.66, 0.85, 0.93);
            break;
        case 'R':
            seg(s, 0.2, 0.1, 0.2, 0.9);
            seg(s, 0.2, 0.1, 0.56, 0.1);
            arc(s, 0.56, 0.3, 0.23, 0.2, -90, 90);
            seg(s, 0.56, 0.5, 0.2, 0.5);
            seg(s, 0.48, 0.5, 0.8, 0.9);
            break;
        case 'S':
            poly(s, {0.78, 0.2, 0.62, 0.1, 0.36, 0.1, 0.21, 0.2, 0.21, 0.38,
                     0.36, 0.48, 0.64, 0.52, 0.79, 0.62, 0.79, 0.8, 0.62, 0.9,
                     0.36, 0.9, 0.2, 0.8});
            break;
        case 'T':
            seg(s, 0.15, 0.1, 0.85, 0.1);
            seg(s, 0.5, 0.1, 0.5, 0.9);
            break;
        case 'U':
            seg(s, 0.2, 0.1, 0.2, 0.62);
            arc(s, 0.5, 0.62, 0.3, 0.28, 180, 0);
            seg(s, 0.8, 0.62, 0.8, 0.1);
            break;
        case 'V':
            poly(s, {0.15, 0.1, 0.5, 0.9, 0.85, 0.1});
            break;
        case 'W':
            poly(s, {0.1, 0.1, 0.28, 0.9, 0.5, 0.32, 0.72, 0.9, 0.9, 0.1});
            break;
        case 'X':
            seg(s, 0.2, 0.1, 0.8, 0.9);
            seg(s, 0.8, 0.1, 0.2, 0.9);
            break;
        case 'Y':
            seg(s, 0.2, 0.1, 0.5, 0.5);
            seg(s, 0.8, 0.1, 0.5, 0.5);
            seg(s, 0.5, 0.5, 0.5, 0.9);
            break;
        case 'Z':
            poly(s, {0.2, 0.1, 0.8, 0.1, 0.2, 0.9, 0.8, 0.9});
            break;
        default:
            throw std::invalid_argument("render_letter: letter must be in A..Z");
    }
    return s;
}

double segment_distance(double px, double py, const Seg& s) {
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((px - s.x0) * dx + (py - s.y0) * dy) / len2, 0.0, 1.0);
    const double cx = s.x0 + t * dx, cy = s.y0 + t * dy;
    return std::hypot(px - cx, py - cy);
}

}  // namespace

RasterImage render_letter(char letter, const FontStyle& style, int size) {
    Strokes strokes = letter_strokes(letter);
    for (Seg& s : strokes) {
        auto xf = [&](double& x, double& y) {
            const double nx = 0.5 + (x - 0.5) * style.width_scale + style.slant * (0.5 - y);
            const double ny = 0.5 + (y - 0.5) * style.height_scale;
            x = nx;
            y = ny;
        };
        xf(s.x0, s.y0);
        xf(s.x1, s.y1);
    }
    const double hw = 0.5 * style.stroke_width;
    const double aa = 1.0 / size;  // one-pixel antialiasing band
    RasterImage img(size, size);
    for (int r = 0; r < size; ++r) {
        const double py = (r + 0.5) / size;
        for (int c = 0; c < size; ++c) {
            const double px = (c + 0.5) / size;
            double best = 1e9;
            for (const Seg& s : strokes) best = std::min(best, segment_distance(px, py, s));
            img.at(r, c) = std::clamp((best - hw) / aa + 0.5, 0.0, 1.0);
        }
    }
    return img;
}

FontStyle font_style_variant(int index) {
    if (index < 0) throw std::invalid_argument("font_style_variant: index must be >= 0");
    FontStyle st;
    // Small deterministic grid over width / slant / scale; index 0 is the
    // plain default style.
    static constexpr double kWidths[4] = {0.10, 0.08, 0.12, 0.14};
    static constexpr double kSlants[3] = {0.0, -0.12, 0.12};
    st.stroke_width = kWidths[index % 4];
    st.slant = kSlants[(index / 4) % 3];
    st.width_scale = 1.0 - 0.12 * ((index / 12) % 3);
    st.height_scale = 1.0 - 0.08 * ((index / 36) % 2);
    return st;
}

std::string write_dataset(const std::string& root, int n_fonts, int size, int validation_fonts) {
    if (n_fonts < 1) throw std::invalid_argument("write_dataset: need at least one font");
    if (validation_fonts >= n_fonts)
        throw std::invalid_argument("write_dataset: validation split leaves no training fonts");
    namespace fs = std::filesystem;
    fs::create_directories(root);
    std::vector<std::string> names;
    for (int f = 0; f < n_fonts; ++f) {
        const std::string name = "synth" + std::string(f < 10 ? "0" : "") + std::to_string(f);
        names.push_back(name);
        const fs::path dir = fs::path(root) / name;
        fs::create_directories(dir);
        const FontStyle style = font_style_variant(f);
        for (char ch = 'A'; ch <= 'Z'; ++ch)
            save_pgm(render_letter(ch, style, size), (dir / (std::string(1, ch) + ".pgm")).string());
    }
    const fs::path index = fs::path(root) / "index.txt";
    std::ofstream f(index, std::ios::trunc);
    for (int i = 0; i < n_fonts; ++i)
        f << (i < n_fonts - validation_fonts ? "train " : "validation ") << names[i] << '\n';
    return index.string();
}

}  // namespace glyph
