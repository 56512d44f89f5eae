#include "glyph/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "glyph/adam.hpp"

namespace glyph {

ShapeGrad ShapeGrad::zeros(int v, int p) {
    ShapeGrad g;
    g.P.assign(static_cast<std::size_t>(v) * p * 6, 0.0);
    g.sigma.assign(static_cast<std::size_t>(v) * p, 0.0);
    g.W.assign(static_cast<std::size_t>(v), 0.0);
    return g;
}

void ShapeGrad::add(const ShapeGrad& other) {
    for (std::size_t k = 0; k < P.size(); ++k) P[k] += other.P[k];
    for (std::size_t k = 0; k < sigma.size(); ++k) sigma[k] += other.sigma[k];
    for (std::size_t k = 0; k < W.size(); ++k) W[k] += other.W[k];
}

double KinkDistances::min() const {
    return std::min(relu_arg, std::min(clamp_margin, w_margin));
}

double loss_rec(const GlyphShapeParams& params, const SampleBatch& batch) {
    if (batch.empty()) throw std::invalid_argument("loss_rec: empty batch");
    double acc = 0.0;
    for (const Sample& s : batch) {
        const double e = eval_shape_soft(params, s.pt) - s.target;
        acc += e * e;
    }
    return acc / static_cast<double>(batch.size());
}

double loss_w(std::span<const double> W) {
    double acc = 0.0;
    for (double w : W) acc += std::abs(w - 1.0);
    return acc;
}

double total_loss(const GlyphShapeParams& params, const SampleBatch& batch, double lambda_w) {
    return loss_rec(params, batch) + lambda_w * loss_w(params.W);
}

namespace {

// Forward + backward for one sample. dplus/d buffers are scratch of size
// v and v*p.
double sample_loss_grad(const GlyphShapeParams& params, const Sample& smp,
                        double inv_n, ShapeGrad& grad, KinkDistances* kinks,
                        std::vector<double>& d_buf, std::vector<double>& dplus_buf) {
    const int v = params.v, p = params.p;
    double q[6];
    curve_basis(smp.pt, q);

    double s = 0.0;
    for (int i = 0; i < v; ++i) {
        const double* curves = params.P.data() + static_cast<std::size_t>(i) * p * 6;
        const double* sig = params.sigma.data() + static_cast<std::size_t>(i) * p;
        double dplus = 0.0;
        for (int j = 0; j < p; ++j) {
            double d = 0.0;
            const double* cj = curves + j * 6;
            for (int k = 0; k < 6; ++k) d += q[k] * cj[k];
            d_buf[static_cast<std::size_t>(i) * p + j] = d;
            const double u = sig[j] * d;
            if (kinks) kinks->relu_arg = std::min(kinks->relu_arg, std::abs(u));
            if (u > 0.0) dplus += u;
        }
        dplus_buf[i] = dplus;
        s += params.W[i] * (1.0 - dplus);
    }
    if (kinks)
        kinks->clamp_margin = std::min(kinks->clamp_margin, std::min(std::abs(s), std::abs(1.0 - s)));

    const double clamped = std::clamp(s, 0.0, 1.0);
    const double e = (1.0 - clamped) - smp.target;
    const double loss = e * e * inv_n;

    // clamp subgradient: 1 on the closed interval [0,1], 0 strictly outside
    if (s < 0.0 || s > 1.0) return loss;
    const double ds = -2.0 * e * inv_n;
    for (int i = 0; i < v; ++i) {
        grad.W[i] += ds * (1.0 - dplus_buf[i]);
        const double ddplus = -ds * params.W[i];
        if (ddplus == 0.0) continue;
        const double* sig = params.sigma.data() + static_cast<std::size_t>(i) * p;
        for (int j = 0; j < p; ++j) {
            const double d = d_buf[static_cast<std::size_t>(i) * p + j];
            if (sig[j] * d <= 0.0) continue;  // ReLU gate (subgradient 0 at the kink)
            grad.sigma[static_cast<std::size_t>(i) * p + j] += ddplus * d;
            const double dd = ddplus * sig[j];
            double* gP = grad.P.data() + (static_cast<std::size_t>(i) * p + j) * 6;
            for (int k = 0; k < 6; ++k) gP[k] += dd * q[k];
        }
    }
    return loss;
}

constexpr std::size_t kGradChunk = 512;

}  // namespace

double loss_rec_grad(const GlyphShapeParams& params, const SampleBatch& batch,
                     ShapeGrad& grad, KinkDistances* kinks) {
    if (batch.empty()) throw std::invalid_argument("loss_rec_grad: empty batch");
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const std::size_t nchunks = chunk_count(batch.size(), kGradChunk);

    std::vector<ShapeGrad> partial(nchunks);
    std::vector<KinkDistances> partial_kinks(nchunks);
    std::vector<double> partial_loss(nchunks, 0.0);
    parallel_chunks(batch.size(), kGradChunk, [&](std::size_t ci, std::size_t b, std::size_t e) {
        partial[ci] = ShapeGrad::zeros(params.v, params.p);
        std::vector<double> d_buf(static_cast<std::size_t>(params.v) * params.p);
        std::vector<double> dplus_buf(params.v);
        double acc = 0.0;
        for (std::size_t k = b; k < e; ++k)
            acc += sample_loss_grad(params, batch[k], inv_n, partial[ci],
                                    kinks ? &partial_kinks[ci] : nullptr, d_buf, dplus_buf);
        partial_loss[ci] = acc;
    });

    double loss = 0.0;
    for (std::size_t ci = 0; ci < nchunks; ++ci) {
        loss += partial_loss[ci];
        grad.add(partial[ci]);
        if (kinks) {
            kinks->relu_arg = std::min(kinks->relu_arg, partial_kinks[ci].relu_arg);
            kinks->clamp_margin = std::min(kinks->clamp_margin, partial_kinks[ci].clamp_margin);
        }
    }
    return loss;
}

double total_loss_grad(const GlyphShapeParams& params, const SampleBatch& batch,
                       double lambda_w, ShapeGrad& grad, KinkDistances* kinks) {
    const double rec = loss_rec_grad(params, batch, grad, kinks);
    double lw = 0.0;
    for (int i = 0; i < params.v; ++i) {
        const double r = params.W[i] - 1.0;
        lw += std::abs(r);
        if (kinks) kinks->w_margin = std::min(kinks->w_margin, std::abs(r));
        if (r > 0.0) grad.W[i] += lambda_w;
        else if (r < 0.0) grad.W[i] -= lambda_w;
        // |.| subgradient at 0 is 0
    }
    return rec + lambda_w * lw;
}

SampleBatch make_batch(const RasterImage& img, int n, std::uint64_t seed) {
    const std::size_t total = img.pixels.size();
    if (n < 1) throw std::invalid_argument("make_batch: n must be >= 1");
    if (static_cast<std::size_t>(n) > total)
        throw std::invalid_argument("make_batch: n exceeds pixel count");

    SampleBatch batch;
    batch.reserve(n);
    auto push = [&](std::size_t idx) {
        const int r = static_cast<int>(idx) / img.width;
        const int c = static_cast<int>(idx) % img.width;
        batch.push_back({pixel_to_coord(r, c, img.height, img.width), img.pixels[idx]});
    };
    if (static_cast<std::size_t>(n) == total) {
        for (std::size_t idx = 0; idx < total; ++idx) push(idx);
        return batch;
    }
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = make_rng(seed);
    for (int k = 0; k < n; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, total - 1);
        std::swap(idx[k], idx[pick(rng)]);
        push(idx[k]);
    }
    return batch;
}

namespace {

void init_gaussian(const FitConfig& cfg, Rng& rng, GlyphShapeParams& params) {
    for (int i = 0; i < cfg.v; ++i)
        for (int j = 0; j < cfg.p; ++j) {
            auto c = params.curve(i, j);
            for (int k = 0; k < 3; ++k) c[k] = gaussian(rng, 0.0, cfg.init_scale_quad);
            for (int k = 3; k < 6; ++k) c[k] = gaussian(rng, 0.0, cfg.init_scale_linear);
        }
    std::fill(params.sigma.begin(), params.sigma.end(), cfg.init_sigma);
    for (double& w : params.W) w = cfg.init_w_mean + gaussian(rng, 0.0, cfg.init_scale_w);
}

void init_disks(const FitConfig& cfg, Rng& rng, GlyphShapeParams& params,
                const std::vector<Point2>& ink) {
    std::uniform_real_distribution<double> center(-0.5, 0.5);
    std::uniform_real_distribution<double> radius(0.08, 0.18);
    for (int i = 0; i < cfg.v; ++i) {
        double cx, cy;
        if (!ink.empty()) {
            const Point2 pt = ink[std::uniform_int_distribution<std::size_t>(0, ink.size() - 1)(rng)];
            cx = pt.x;
            cy = pt.y;
        } else {
            cx = center(rng);
            cy = center(rng);
        }
        const double r = radius(rng);
        for (int j = 0; j < cfg.p; ++j) {
            auto c = params.curve(i, j);
            c[0] = 1.0 + gaussian(rng, 0.0, cfg.init_scale_quad);
            c[1] = gaussian(rng, 0.0, cfg.init_scale_quad);
            c[2] = 1.0 + gaussian(rng, 0.0, cfg.init_scale_quad);
            c[3] = -2.0 * cx + gaussian(rng, 0.0, cfg.init_scale_linear);
            c[4] = -2.0 * cy + gaussian(rng, 0.0, cfg.init_scale_linear);
            c[5] = cx * cx + cy * cy - r * r + gaussian(rng, 0.0, cfg.init_scale_linear);
        }
    }
    std::fill(params.sigma.begin(), params.sigma.end(), cfg.init_sigma);
    for (double& w : params.W) w = cfg.init_w_mean + gaussian(rng, 0.0, cfg.init_scale_w);
}

// Quadratic curve as raw coefficients over [x^2, xy, y^2, x, y, 1].
using Quad = std::array<double, 6>;

// Mahalanobis ellipse of a point cloud: (x-mu)^T S^-1 (x-mu) - rho2.
// Positive outside the ellipse.
Quad ellipse_outside(const std::vector<Point2>& pts, double rho2_scale) {
    const double n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (const Point2& p : pts) { mx += p.x; my += p.y; }
    mx /= n;
    my /= n;
    double sxx = 1e-4, sxy = 0, syy = 1e-4;
    for (const Point2& p : pts) {
        sxx += (p.x - mx) * (p.x - mx) / n;
        sxy += (p.x - mx) * (p.y - my) / n;
        syy += (p.y - my) * (p.y - my) / n;
    }
    const double det = sxx * syy - sxy * sxy;
    const double i00 = syy / det, i01 = -sxy / det, i11 = sxx / det;
    double rho2 = 0.0;
    for (const Point2& p : pts) {
        const double dx = p.x - mx, dy = p.y - my;
        rho2 = std::max(rho2, i00 * dx * dx + 2 * i01 * dx * dy + i11 * dy * dy);
    }
    rho2 *= rho2_scale;
    Quad q;
    q[0] = i00;
    q[1] = 2 * i01;
    q[2] = i11;
    q[3] = -2 * i00 * mx - 2 * i01 * my;
    q[4] = -2 * i11 * my - 2 * i01 * mx;
    q[5] = i00 * mx * mx + 2 * i01 * mx * my + i11 * my * my - rho2;
    return q;
}

double quad_eval(const Quad& q, Point2 p) {
    return q[0] * p.x * p.x + q[1] * p.x * p.y + q[2] * p.y * p.y + q[3] * p.x + q[4] * p.y + q[5];
}

// Background detectors: curves chosen greedily so that their positive
// regions jointly cover the background while every curve stays nonpositive
// on ink. Candidates per round: a least-squares quadratic separating the
// largest still-uncovered background component from ink, half-planes pushed
// just past the ink extent in a fan of directions, and the complement of the
// ink hull ellipse; the candidate covering the most background wins. Every
// primitive then excludes (almost) exactly the background: the hard union
// starts equal to the ink, the soft sum is v on ink and strongly negative on
// covered background, and W sits at its regularizer optimum 1, so
// optimization only refines boundaries and the hard and soft fields stay in
// agreement.
void init_detectors(const FitConfig& cfg, Rng& rng, GlyphShapeParams& params,
                    const RasterImage& img, const std::vector<Point2>& ink) {
    const int H = img.height, W = img.width;

    struct Px {
        Point2 pt;
        bool is_ink;
        bool covered;
    };
    std::vector<Px> px;
    px.reserve(static_cast<std::size_t>(H) * W);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c)
            px.push_back({pixel_to_coord(r, c, H, W), img.at(r, c) < 0.5, false});

    auto shift_off_ink = [&](Quad& q) {
        double ink_max = -1e300;
        for (const Px& p : px)
            if (p.is_ink) ink_max = std::max(ink_max, quad_eval(q, p.pt));
        if (ink_max > -1e-3) q[5] -= ink_max + 1e-3;
    };
    auto count_new = [&](const Quad& q) {
        std::size_t n = 0;
        for (const Px& p : px)
            if (!p.is_ink && !p.covered && quad_eval(q, p.pt) > 0.0) ++n;
        return n;
    };

    // Fan of half-planes tangent to the ink, u.x - max_ink(u.x), plus slab
    // complements (u.x - hi)(u.x - lo): one quadratic positive on both sides
    // of the ink extent along u and negative in between.
    std::vector<Quad> planes;
    for (int a = 0; a < 32; ++a) {
        const double th = 2.0 * 3.14159265358979323846 * a / 32;
        Quad q{0, 0, 0, std::cos(th), std::sin(th), 0.0};
        shift_off_ink(q);
        planes.push_back(q);
    }
    for (int a = 0; a < 16; ++a) {
        const double th = 3.14159265358979323846 * a / 16;
        const double ux = std::cos(th), uy = std::sin(th);
        double lo = 1e300, hi = -1e300;
        for (const Point2& p : ink) {
            const double t = ux * p.x + uy * p.y;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        lo -= 1e-3;
        hi += 1e-3;
        planes.push_back({ux * ux, 2 * ux * uy, uy * uy,
                          -(hi + lo) * ux, -(hi + lo) * uy, hi * lo});
    }
    Quad hull = ellipse_outside(ink, 1.0);
    shift_off_ink(hull);

    std::vector<Quad> curves;
    std::vector<std::vector<double>> covered_vals;
    while (static_cast<int>(curves.size()) < cfg.p) {
        // Largest 4-connected component of still-uncovered background.
        std::vector<int> comp(px.size(), -1);
        std::vector<std::size_t> comp_size;
        for (std::size_t k0 = 0; k0 < px.size(); ++k0) {
            if (px[k0].is_ink || px[k0].covered || comp[k0] >= 0) continue;
            const int id = static_cast<int>(comp_size.size());
            std::size_t n = 0;
            std::vector<std::size_t> stack{k0};
            comp[k0] = id;
            while (!stack.empty()) {
                const std::size_t k = stack.back();
                stack.pop_back();
                ++n;
                const int r = static_cast<int>(k) / W, c = static_cast<int>(k) % W;
                const int nb[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
                for (auto& rc : nb) {
                    if (rc[0] < 0 || rc[0] >= H || rc[1] < 0 || rc[1] >= W) continue;
                    const std::size_t kk = static_cast<std::size_t>(rc[0]) * W + rc[1];
                    if (px[kk].is_ink || px[kk].covered || comp[kk] >= 0) continue;
                    comp[kk] = id;
                    stack.push_back(kk);
                }
            }
            comp_size.push_back(n);
        }
        if (comp_size.empty()) break;
        const int target_comp = static_cast<int>(
            std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());

        // Weighted least squares on the monomial basis: the chosen component
        // targets +1, ink targets -1 with higher weight so the boundary errs
        // toward the background side.
        double A[6][6] = {};
        double b[6] = {};
        for (std::size_t k = 0; k < px.size(); ++k) {
            const Px& q = px[k];
            double t, w;
            if (q.is_ink) { t = -1.0; w = 3.0; }
            else if (comp[k] == target_comp) { t = 1.0; w = 1.0; }
            else continue;
            double basis[6];
            curve_basis(q.pt, basis);
            for (int r = 0; r < 6; ++r) {
                for (int c = 0; c < 6; ++c) A[r][c] += w * basis[r] * basis[c];
                b[r] += w * basis[r] * t;
            }
        }
        for (int r = 0; r < 6; ++r) A[r][r] += 1e-9;
        // Gaussian elimination with partial pivoting.
        for (int col = 0; col < 6; ++col) {
            int piv = col;
            for (int r = col + 1; r < 6; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            std::swap(A[col], A[piv]);
            std::swap(b[col], b[piv]);
            for (int r = col + 1; r < 6; ++r) {
                const double f = A[r][col] / A[col][col];
                for (int c = col; c < 6; ++c) A[r][c] -= f * A[col][c];
                b[r] -= f * b[col];
            }
        }
        Quad ls;
        for (int r = 5; r >= 0; --r) {
            double s = b[r];
            for (int c = r + 1; c < 6; ++c) s -= A[r][c] * ls[c];
            ls[r] = s / A[r][r];
        }
        shift_off_ink(ls);

        // Covariance ellipse of the component itself, flipped positive
        // inside; robust for compact holes and notches where the
        // least-squares boundary bleeds onto thin neighboring strokes.
        std::vector<Point2> comp_pts;
        for (std::size_t k = 0; k < px.size(); ++k)
            if (comp[k] == target_comp) comp_pts.push_back(px[k].pt);
        auto flipped_ellipse = [&](const std::vector<Point2>& pts) {
            Quad q = ellipse_outside(pts, 1.0);
            for (double& v : q) v = -v;
            shift_off_ink(q);
            return q;
        };
        auto split_pts = [](const std::vector<Point2>& pts) {
            double mx = 0, my = 0;
            for (const Point2& p : pts) { mx += p.x; my += p.y; }
            mx /= pts.size();
            my /= pts.size();
            double sxx = 0, sxy = 0, syy = 0;
            for (const Point2& p : pts) {
                sxx += (p.x - mx) * (p.x - mx);
                sxy += (p.x - mx) * (p.y - my);
                syy += (p.y - my) * (p.y - my);
            }
            const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
            const double lam = tr / 2 + std::sqrt(std::max(tr * tr / 4 - det, 0.0));
            double ax = sxy, ay = lam - sxx;
            if (std::abs(ax) + std::abs(ay) < 1e-12) { ax = 1; ay = 0; }
            std::pair<std::vector<Point2>, std::vector<Point2>> halves;
            for (const Point2& p : pts)
                ((p.x - mx) * ax + (p.y - my) * ay <= 0 ? halves.first : halves.second)
                    .push_back(p);
            return halves;
        };
        // Ellipses of the whole component and of its principal-axis halves
        // and quarters; splitting rescues elongated or wrapped components.
        std::vector<Quad> comp_cands{flipped_ellipse(comp_pts)};
        auto halves = split_pts(comp_pts);
        for (const auto& half : {halves.first, halves.second}) {
            if (half.size() < 4) continue;
            comp_cands.push_back(flipped_ellipse(half));
            auto quarters = split_pts(half);
            for (const auto& quarter : {quarters.first, quarters.second})
                if (quarter.size() >= 4) comp_cands.push_back(flipped_ellipse(quarter));
        }

        Quad best = ls;
        std::size_t best_new = count_new(ls);
        for (const Quad& q : comp_cands) {
            const std::size_t n = count_new(q);
            if (n > best_new) { best_new = n; best = q; }
        }
        for (const Quad& q : planes) {
            const std::size_t n = count_new(q);
            if (n > best_new) { best_new = n; best = q; }
        }
        {
            const std::size_t n = count_new(hull);
            if (n > best_new) { best_new = n; best = hull; }
        }
        if (best_new == 0) break;

        std::vector<double> vals;
        for (Px& p : px) {
            if (p.is_ink || p.covered) continue;
            const double v = quad_eval(best, p.pt);
            if (v > 0.0) {
                p.covered = true;
                vals.push_back(v);
            }
        }
        curves.push_back(best);
        covered_vals.push_back(std::move(vals));
    }
    if (curves.empty()) {
        curves.push_back(hull);
        covered_vals.push_back({1.0});
    }
    while (static_cast<int>(curves.size()) < cfg.p) {
        curves.push_back(curves.back());
        covered_vals.push_back(covered_vals.back());
    }

    // Margin refinement. The greedy cover gets the topology right but its
    // boundaries are set by global ink extents, leaving a halo of background
    // pixels where max_j g_j is barely positive. Hinge losses on
    // z = max_j g_j (background wants z >= m_bg, ink wants z <= -m_ink) with
    // per-curve renormalization tighten every boundary locally. Noisy
    // restarts escape bad curve-to-region assignments.
    {
        const double m_bg = 0.04, m_ink = 0.01, ink_weight = 4.0;
        const int prefit_iters = 1500, restarts = 3;

        for (Quad& q : curves) {
            double n2 = 0.0;
            for (double v : q) n2 += v * v;
            if (n2 > 0.0)
                for (double& v : q) v /= std::sqrt(n2);
        }

        auto violation_score = [&](const std::vector<Quad>& cs) {
            double score = 0.0;
            for (const Px& p : px) {
                double z = -1e300;
                for (const Quad& q : cs) z = std::max(z, quad_eval(q, p.pt));
                if (!p.is_ink && z < 0.0) score += 1.0;
                else if (p.is_ink && z > 0.0) score += ink_weight;
            }
            return score;
        };

        auto prefit = [&](std::vector<Quad> cs) {
            std::vector<std::array<double, 6>> grads(cs.size());
            std::vector<AdamState> opt(cs.size(), AdamState(6, {.lr = 2e-3}));
            for (int it = 0; it < prefit_iters; ++it) {
                for (auto& g : grads) g.fill(0.0);
                for (const Px& p : px) {
                    double basis[6];
                    curve_basis(p.pt, basis);
                    double z = -1e300;
                    std::size_t arg = 0;
                    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
                        const double v = quad_eval(cs[ci], p.pt);
                        if (v > z) { z = v; arg = ci; }
                    }
                    if (!p.is_ink && z < m_bg) {
                        for (int k = 0; k < 6; ++k) grads[arg][k] -= basis[k];
                    } else if (p.is_ink && z > -m_ink) {
                        // every curve violating the ink margin is pushed down
                        for (std::size_t ci = 0; ci < cs.size(); ++ci)
                            if (quad_eval(cs[ci], p.pt) > -m_ink)
                                for (int k = 0; k < 6; ++k)
                                    grads[ci][k] += ink_weight * basis[k];
                    }
                }
                for (std::size_t ci = 0; ci < cs.size(); ++ci) {
                    adam_step(opt[ci], cs[ci], grads[ci]);
                    double n2 = 0.0;
                    for (double v : cs[ci]) n2 += v * v;
                    if (n2 > 1.0)
                        for (double& v : cs[ci]) v /= std::sqrt(n2);
                }
            }
            return cs;
        };

        std::vector<Quad> best = prefit(curves);
        double best_score = violation_score(best);
        for (int rs = 1; rs < restarts && best_score > 0.0; ++rs) {
            std::vector<Quad> noisy = curves;
            for (Quad& q : noisy)
                for (double& v : q) v += gaussian(rng, 0.0, 0.05);
            std::vector<Quad> cand = prefit(std::move(noisy));
            const double score = violation_score(cand);
            if (score < best_score) {
                best_score = score;
                best = std::move(cand);
            }
        }
        curves = std::move(best);
    }

    // Scale so the background almost everywhere clears sigma * z >= 2: the
    // soft sum is then strongly negative off the ink for any sigma >= 1.
    {
        std::vector<double> zbg;
        for (const Px& p : px) {
            if (p.is_ink) continue;
            double z = -1e300;
            for (const Quad& q : curves) z = std::max(z, quad_eval(q, p.pt));
            if (z > 0.0) zbg.push_back(z);
        }
        if (!zbg.empty()) {
            const std::size_t k5 = zbg.size() / 20;
            std::nth_element(zbg.begin(), zbg.begin() + k5, zbg.end());
            const double q05 = std::max(zbg[k5], 1e-6);
            for (Quad& q : curves)
                for (double& v : q) v *= 2.0 / q05;
        }
    }
    for (int i = 0; i < cfg.v; ++i)
        for (int j = 0; j < cfg.p; ++j) {
            auto c = params.curve(i, j);
            const Quad& q = curves[j];
            for (int k = 0; k < 6; ++k)
                c[k] = q[k] * (1.0 + gaussian(rng, 0.0, cfg.init_jitter));
        }
    std::fill(params.sigma.begin(), params.sigma.end(), cfg.init_sigma);
    std::fill(params.W.begin(), params.W.end(), 1.0);
}

}  // namespace

GlyphShapeParams init_shape_params(const FitConfig& cfg, Rng& rng, const RasterImage* img) {
    GlyphShapeParams params = GlyphShapeParams::zeros(cfg.v, cfg.p);
    std::vector<Point2> ink;
    if (img)
        for (int r = 0; r < img->height; ++r)
            for (int c = 0; c < img->width; ++c)
                if (img->at(r, c) < 0.5) ink.push_back(pixel_to_coord(r, c, img->height, img->width));
    switch (cfg.init) {
        case FitInit::Gaussian:
            init_gaussian(cfg, rng, params);
            break;
        case FitInit::Disks:
            init_disks(cfg, rng, params, ink);
            break;
        case FitInit::Detectors:
            if (img && ink.size() >= 8) init_detectors(cfg, rng, params, *img, ink);
            else init_gaussian(cfg, rng, params);
            break;
    }
    return params;
}

FitResult fit_glyph(const RasterImage& img, const FitConfig& cfg) {
    if (cfg.iterations < 1) throw std::invalid_argument("fit_glyph: iterations must be >= 1");
    Rng rng = make_rng(cfg.seed);
    FitResult result;
    result.params = init_shape_params(cfg, rng, &img);
    GlyphShapeParams& params = result.params;

    const int batch_n = cfg.batch_size > 0 ? cfg.batch_size
                                           : static_cast<int>(img.pixels.size());
    SampleBatch full;
    if (cfg.batch_size == 0) full = make_batch(img, batch_n, cfg.seed);

    const std::size_t np = params.P.size(), ns = params.sigma.size(), nw = params.W.size();
    AdamConfig acfg;
    acfg.lr = cfg.lr;
    AdamState state(np + ns + nw, acfg);

    std::vector<double> flat(np + ns + nw), gflat(np + ns + nw);
    auto gather = [&] {
        std::copy(params.P.begin(), params.P.end(), flat.begin());
        std::copy(params.sigma.begin(), params.sigma.end(), flat.begin() + np);
        std::copy(params.W.begin(), params.W.end(), flat.begin() + np + ns);
    };
    auto scatter = [&] {
        std::copy(flat.begin(), flat.begin() + np, params.P.begin());
        std::copy(flat.begin() + np, flat.begin() + np + ns, params.sigma.begin());
        std::copy(flat.begin() + np + ns, flat.end(), params.W.begin());
    };

    result.trace.reserve(cfg.iterations);
    for (int it = 0; it < cfg.iterations; ++it) {
        const SampleBatch& batch =
            cfg.batch_size == 0 ? full : (full = make_batch(img, batch_n, cfg.seed + 1 + it), full);
        ShapeGrad grad = ShapeGrad::zeros(cfg.v, cfg.p);
        const double rec = loss_rec_grad(params, batch, grad);
        double lw = 0.0;
        for (std::size_t i = 0; i < nw; ++i) {
            const double r = params.W[i] - 1.0;
            lw += std::abs(r);
            if (r > 0.0) grad.W[i] += cfg.lambda_w;
            else if (r < 0.0) grad.W[i] -= cfg.lambda_w;
        }
        const double total = rec + cfg.lambda_w * lw;
        result.trace.push_back({it, rec, lw, total});
        if (!std::isfinite(total)) {
            result.diverged = true;
            return result;
        }
        gather();
        std::copy(grad.P.begin(), grad.P.end(), gflat.begin());
        std::copy(grad.sigma.begin(), grad.sigma.end(), gflat.begin() + np);
        std::copy(grad.W.begin(), grad.W.end(), gflat.begin() + np + ns);
        bool finite = true;
        for (double g : gflat)
            if (!std::isfinite(g)) { finite = false; break; }
        if (!finite) {
            result.diverged = true;
            return result;
        }
        adam_step(state, flat, gflat);
        if (cfg.sigma_floor > 0.0)
            for (std::size_t k = np; k < np + ns; ++k)
                if (flat[k] < cfg.sigma_floor) flat[k] = cfg.sigma_floor;
        scatter();
    }
    return result;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    f << "iteration,loss_rec,loss_w,total\n";
    f.precision(12);
    for (const TraceRow& row : trace)
        f << row.iteration << ',' << row.rec << ',' << row.w << ',' << row.total << '\n';
}

}  // namespace glyph
