#include "glyph/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace glyph {

namespace {

// Reads one whitespace/comment-delimited token from a PGM header.
std::string next_token(std::istringstream& in) {
    std::string tok;
    while (in) {
        int ch = in.peek();
        if (ch == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(ch)) {
            in.get();
            continue;
        }
        break;
    }
    in >> tok;
    return tok;
}

}  // namespace

std::string pgm_bytes(const RasterImage& img) {
    std::string out = "P5\n" + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    out.reserve(out.size() + img.pixels.size());
    for (double p : img.pixels) {
        const double clamped = std::clamp(p, 0.0, 1.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
    }
    return out;
}

RasterImage parse_pgm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw std::runtime_error("PGM: missing magic number");
    if (bytes[1] == '6' || bytes[1] == '3')
        throw std::runtime_error("PGM: color PPM not supported, need P5 grayscale");
    if (bytes[1] != '5')
        throw std::runtime_error("PGM: unsupported magic (need binary P5)");

    std::istringstream in(bytes);
    in.ignore(2);
    const std::string ws = next_token(in), hs = next_token(in), ms = next_token(in);
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(ws);
        h = std::stoi(hs);
        maxval = std::stoi(ms);
    } catch (const std::exception&) {
        throw std::runtime_error("PGM: malformed header");
    }
    if (w < 1 || h < 1) throw std::runtime_error("PGM: non-positive dimensions");
    if (maxval != 255) throw std::runtime_error("PGM: unsupported depth, need maxval 255");

    const std::streamoff header_end = in.tellg();
    if (header_end < 0) throw std::runtime_error("PGM: truncated header");
    const std::size_t data_start = static_cast<std::size_t>(header_end) + 1;  // single whitespace after maxval
    const std::size_t need = static_cast<std::size_t>(w) * h;
    if (bytes.size() < data_start + need)
        throw std::runtime_error("PGM: truncated pixel data");

    RasterImage img(h, w);
    for (std::size_t k = 0; k < need; ++k)
        img.pixels[k] = static_cast<unsigned char>(bytes[data_start + k]) / 255.0;
    return img;
}

RasterImage load_pgm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open image file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    try {
        return parse_pgm(buf.str());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_pgm(const RasterImage& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    const std::string bytes = pgm_bytes(img);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

Point2 pixel_to_coord(int r, int c, int H, int W) {
    if (r < 0 || r >= H || c < 0 || c >= W)
        throw std::out_of_range("pixel_to_coord: index outside grid");
    return {(2.0 * c + 1.0) / W - 1.0, (2.0 * r + 1.0) / H - 1.0};
}

RasterImage render_soft(const GlyphShapeParams& params, int H, int W) {
    RasterImage img(H, W);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c)
            img.at(r, c) = eval_shape_soft(params, pixel_to_coord(r, c, H, W));
    return img;
}

RasterImage render_hard(const GlyphShapeParams& params, int H, int W, double w_min) {
    RasterImage img(H, W);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c)
            img.at(r, c) = occupancy_hard(params, pixel_to_coord(r, c, H, W), w_min) ? 0.0 : 1.0;
    return img;
}

RasterImage downsample(const RasterImage& img, int H, int W) {
    if (H < 1 || W < 1 || img.height % H != 0 || img.width % W != 0)
        throw std::invalid_argument("downsample: target must divide source dimensions");
    const int fr = img.height / H, fc = img.width / W;
    RasterImage out(H, W);
    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            double acc = 0.0;
            for (int i = 0; i < fr; ++i)
                for (int j = 0; j < fc; ++j) acc += img.at(r * fr + i, c * fc + j);
            out.at(r, c) = acc / (fr * fc);
        }
    }
    return out;
}

RasterImage threshold(const RasterImage& img, double thresh) {
    RasterImage out(img.height, img.width);
    for (std::size_t k = 0; k < img.pixels.size(); ++k)
        out.pixels[k] = img.pixels[k] < thresh ? 0.0 : 1.0;
    return out;
}

namespace {

std::vector<double> gaussian_kernel_11() {
    std::vector<double> k(11);
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double x = i - 5.0;
        k[i] = std::exp(-x * x / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable 11-tap filter, valid region only.
std::vector<double> filter_valid(const std::vector<double>& img, int H, int W,
                                 const std::vector<double>& k) {
    const int oh = H - 10, ow = W - 10;
    std::vector<double> tmp(static_cast<std::size_t>(H) * ow);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (int t = 0; t < 11; ++t) acc += k[t] * img[static_cast<std::size_t>(r) * W + c + t];
            tmp[static_cast<std::size_t>(r) * ow + c] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int r = 0; r < oh; ++r)
        for (int c = 0; c < ow; ++c) {
            double acc = 0.0;
            for (int t = 0; t < 11; ++t) acc += k[t] * tmp[static_cast<std::size_t>(r + t) * ow + c];
            out[static_cast<std::size_t>(r) * ow + c] = acc;
        }
    return out;
}

}  // namespace

double ssim(const RasterImage& a, const RasterImage& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("ssim: image dimensions differ");
    if (a.height < 11 || a.width < 11)
        throw std::invalid_argument("ssim: images smaller than the 11x11 window");

    const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;  // dynamic range 1.0
    const auto k = gaussian_kernel_11();
    const int H = a.height, W = a.width;

    std::vector<double> aa(a.pixels.size()), bb(b.pixels.size()), ab(a.pixels.size());
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        aa[i] = a.pixels[i] * a.pixels[i];
        bb[i] = b.pixels[i] * b.pixels[i];
        ab[i] = a.pixels[i] * b.pixels[i];
    }
    const auto mu_a = filter_valid(a.pixels, H, W, k);
    const auto mu_b = filter_valid(b.pixels, H, W, k);
    const auto m_aa = filter_valid(aa, H, W, k);
    const auto m_bb = filter_valid(bb, H, W, k);
    const auto m_ab = filter_valid(ab, H, W, k);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double va = m_aa[i] - ma * ma;
        const double vb = m_bb[i] - mb * mb;
        const double cov = m_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) /
                 ((ma * ma + mb * mb + C1) * (va + vb + C2));
    }
    return total / static_cast<double>(mu_a.size());
}

double l1_metric(const RasterImage& a, const RasterImage& b) {
    if (a.height != b.height || a.width != b.width)
        throw std::invalid_argument("l1_metric: image dimensions differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
        acc += std::abs(a.pixels[i] - b.pixels[i]);
    return acc / static_cast<double>(a.pixels.size()) * 255.0;
}

MetricReport compare_images(const RasterImage& a, const RasterImage& b) {
    return {ssim(a, b), l1_metric(a, b)};
}

}  // namespace glyph
