#include "glyph/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "glyph/adam.hpp"

namespace glyph {

const LatentEntry* LatentTable::find(const std::string& font, int character) const {
    for (const LatentEntry& e : entries)
        if (e.font == font && e.character == character) return &e;
    return nullptr;
}

GlyphShapeParams decode(const LatentCode& z, const DecoderModel& model) {
    if (static_cast<int>(z.size()) != model.latent_dim)
        throw std::invalid_argument("decode: latent dimension mismatch");
    GlyphShapeParams params = GlyphShapeParams::zeros(model.v, model.p);
    params.P = mlp_forward(model.mparam, z);
    params.sigma = model.sigma;
    params.W = model.W;
    return params;
}

FontDataset load_dataset(const std::string& root, bool invert) {
    namespace fs = std::filesystem;
    const fs::path index = fs::path(root) / "index.txt";
    std::ifstream f(index);
    if (!f) throw std::runtime_error("dataset index not found: " + index.string());

    FontDataset data;
    std::string split, name;
    while (f >> split >> name) {
        if (split != "train" && split != "validation")
            throw std::runtime_error("dataset index: unknown split tag '" + split + "'");
        FontEntry entry;
        entry.name = name;
        for (char ch = 'A'; ch <= 'Z'; ++ch) {
            const fs::path img = fs::path(root) / name / (std::string(1, ch) + ".pgm");
            RasterImage g = load_pgm(img.string());
            if (invert)
                for (double& px : g.pixels) px = 1.0 - px;
            entry.glyphs.push_back(std::move(g));
        }
        const int idx = static_cast<int>(data.fonts.size());
        (split == "train" ? data.train : data.validation).push_back(idx);
        data.fonts.push_back(std::move(entry));
    }
    return data;
}

namespace {

struct GlyphRef {
    int font;
    int character;
};

}  // namespace

ManifoldResult train_autodecoder(const FontDataset& data, const ManifoldConfig& cfg) {
    if (data.train.empty())
        throw std::invalid_argument("train_autodecoder: empty training split");

    std::vector<GlyphRef> glyphs;
    for (int fi : data.train)
        for (int c = 0; c < 26; ++c) glyphs.push_back({fi, c});

    Rng rng = make_rng(cfg.seed);
    ManifoldResult result;
    DecoderModel& model = result.model;
    model.v = cfg.v;
    model.p = cfg.p;
    model.latent_dim = cfg.latent_dim;
    model.mparam = mlp_init({cfg.latent_dim, cfg.hidden, 6 * cfg.v * cfg.p}, rng());

    FitConfig init_cfg = cfg.shape_init;
    init_cfg.v = cfg.v;
    init_cfg.p = cfg.p;
    {
        // Global sigma/W start like the direct-fit scheme; curve
        // coefficients come from the MLP instead.
        GlyphShapeParams seed_params = init_shape_params(init_cfg, rng);
        model.sigma = seed_params.sigma;
        model.W = seed_params.W;
    }

    LatentTable& table = result.table;
    for (const GlyphRef& g : glyphs) {
        LatentEntry e;
        e.font = data.fonts[g.font].name;
        e.character = g.character;
        e.z.resize(cfg.latent_dim);
        for (double& x : e.z) x = gaussian(rng, 0.0, cfg.latent_init_std);
        table.entries.push_back(std::move(e));
    }

    // One flat parameter vector: [mparam | sigma | W | latents...]
    const std::size_t n_mlp = model.mparam.param_count();
    const std::size_t n_sig = model.sigma.size(), n_w = model.W.size();
    const std::size_t n_lat = static_cast<std::size_t>(cfg.latent_dim) * glyphs.size();
    std::vector<double> flat(n_mlp + n_sig + n_w + n_lat), gflat(flat.size());
    auto gather = [&] {
        std::copy(model.mparam.data.begin(), model.mparam.data.end(), flat.begin());
        std::copy(model.sigma.begin(), model.sigma.end(), flat.begin() + n_mlp);
        std::copy(model.W.begin(), model.W.end(), flat.begin() + n_mlp + n_sig);
        std::size_t off = n_mlp + n_sig + n_w;
        for (const LatentEntry& e : table.entries) {
            std::copy(e.z.begin(), e.z.end(), flat.begin() + off);
            off += cfg.latent_dim;
        }
    };
    auto scatter = [&] {
        std::copy(flat.begin(), flat.begin() + n_mlp, model.mparam.data.begin());
        std::copy(flat.begin() + n_mlp, flat.begin() + n_mlp + n_sig, model.sigma.begin());
        std::copy(flat.begin() + n_mlp + n_sig, flat.begin() + n_mlp + n_sig + n_w, model.W.begin());
        std::size_t off = n_mlp + n_sig + n_w;
        for (LatentEntry& e : table.entries) {
            std::copy(flat.begin() + off, flat.begin() + off + cfg.latent_dim, e.z.begin());
            off += cfg.latent_dim;
        }
    };

    AdamConfig acfg;
    acfg.lr = cfg.lr;
    AdamState state(flat.size(), acfg);

    // Full-pixel batches per glyph, reused across iterations.
    std::vector<SampleBatch> batches(data.fonts.size() * 26);
    auto batch_for = [&](const GlyphRef& g) -> const SampleBatch& {
        SampleBatch& b = batches[static_cast<std::size_t>(g.font) * 26 + g.character];
        if (b.empty()) {
            const RasterImage& img = data.fonts[g.font].glyphs[g.character];
            b = make_batch(img, static_cast<int>(img.pixels.size()), 0);
        }
        return b;
    };

    GlyphShapeParams work = GlyphShapeParams::zeros(cfg.v, cfg.p);
    work.sigma = model.sigma;
    work.W = model.W;

    result.trace.reserve(cfg.iterations);
    std::uniform_int_distribution<std::size_t> pick(0, glyphs.size() - 1);
    for (int it = 0; it < cfg.iterations; ++it) {
        std::fill(gflat.begin(), gflat.end(), 0.0);
        work.sigma = model.sigma;
        work.W = model.W;
        const double inv_b = 1.0 / cfg.batch_glyphs;
        double rec_total = 0.0;
        for (int b = 0; b < cfg.batch_glyphs; ++b) {
            const std::size_t gi = pick(rng);
            const GlyphRef& g = glyphs[gi];
            const LatentEntry& entry = table.entries[gi];

            MlpTrace trace = mlp_forward_cached(model.mparam, entry.z);
            work.P = trace.output();

            ShapeGrad sgrad = ShapeGrad::zeros(cfg.v, cfg.p);
            const double rec = loss_rec_grad(work, batch_for(g), sgrad);
            rec_total += rec * inv_b;

            for (double& x : sgrad.P) x *= inv_b;
            const std::vector<double> dz = mlp_backward(
                model.mparam, trace, sgrad.P, std::span<double>(gflat.data(), n_mlp));
            for (std::size_t k = 0; k < n_sig; ++k) gflat[n_mlp + k] += inv_b * sgrad.sigma[k];
            for (std::size_t k = 0; k < n_w; ++k) gflat[n_mlp + n_sig + k] += inv_b * sgrad.W[k];
            double* glat = gflat.data() + n_mlp + n_sig + n_w + gi * cfg.latent_dim;
            for (int k = 0; k < cfg.latent_dim; ++k) glat[k] += dz[k];
        }
        double lw = 0.0;
        for (std::size_t i = 0; i < n_w; ++i) {
            const double r = model.W[i] - 1.0;
            lw += std::abs(r);
            if (r > 0.0) gflat[n_mlp + n_sig + i] += cfg.lambda_w;
            else if (r < 0.0) gflat[n_mlp + n_sig + i] -= cfg.lambda_w;
        }
        const double total = rec_total + cfg.lambda_w * lw;
        result.trace.push_back({it, rec_total, lw, total});
        if (!std::isfinite(total)) {
            result.diverged = true;
            return result;
        }
        gather();
        adam_step(state, flat, gflat);
        scatter();
    }
    return result;
}

LatentCode infer_latent(const RasterImage& img, const DecoderModel& model,
                        const InferConfig& cfg) {
    LatentCode z(model.latent_dim, 0.0);
    if (cfg.steps <= 0) return z;

    const SampleBatch batch = make_batch(img, static_cast<int>(img.pixels.size()), 0);
    AdamConfig acfg;
    acfg.lr = cfg.lr;
    AdamState state(z.size(), acfg);

    GlyphShapeParams work = GlyphShapeParams::zeros(model.v, model.p);
    work.sigma = model.sigma;
    work.W = model.W;
    std::vector<double> scratch(model.mparam.param_count());

    for (int it = 0; it < cfg.steps; ++it) {
        MlpTrace trace = mlp_forward_cached(model.mparam, z);
        work.P = trace.output();
        ShapeGrad sgrad = ShapeGrad::zeros(model.v, model.p);
        const double rec = loss_rec_grad(work, batch, sgrad);
        if (!std::isfinite(rec)) throw std::domain_error("infer_latent: non-finite loss");
        std::fill(scratch.begin(), scratch.end(), 0.0);
        const std::vector<double> dz = mlp_backward(model.mparam, trace, sgrad.P, scratch);
        adam_step(state, z, dz);
    }
    return z;
}

LatentCode interpolate(const LatentCode& z1, const LatentCode& z2, double t) {
    if (z1.size() != z2.size()) throw std::invalid_argument("interpolate: dimension mismatch");
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("interpolate: t outside [0,1]");
    if (t == 0.0) return z1;
    if (t == 1.0) return z2;
    LatentCode out(z1.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (1.0 - t) * z1[k] + t * z2[k];
    return out;
}

}  // namespace glyph
