#include "glyph/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "glyph/adam.hpp"
#include "glyph/grad_bundles.hpp"

namespace glyph {

TransferModel transfer_init(std::uint64_t seed) {
    Rng rng = make_rng(seed);
    TransferModel m;
    m.sep = mlp_init({256, 256, 256}, rng());
    m.merge = mlp_init({256, 256, 256, 256}, rng());
    m.classifier = mlp_init({256, 256, 26}, rng());
    return m;
}

TransferGrad TransferGrad::zeros(const TransferModel& m) {
    TransferGrad g;
    g.sep.assign(m.sep.param_count(), 0.0);
    g.merge.assign(m.merge.param_count(), 0.0);
    g.classifier.assign(m.classifier.param_count(), 0.0);
    return g;
}

std::pair<StyleVector, ContentVector> separate(const LatentCode& z, const TransferModel& m) {
    const std::vector<double> out = mlp_forward(m.sep, z);
    StyleVector f(out.begin(), out.begin() + m.style_dim);
    ContentVector h(out.begin() + m.style_dim, out.end());
    return {std::move(f), std::move(h)};
}

LatentCode merge(const StyleVector& f, const ContentVector& h, const TransferModel& m) {
    std::vector<double> concat;
    concat.reserve(f.size() + h.size());
    concat.insert(concat.end(), f.begin(), f.end());
    concat.insert(concat.end(), h.begin(), h.end());
    return mlp_forward(m.merge, concat);
}

std::vector<double> classify_latent(const LatentCode& z, const TransferModel& m) {
    return mlp_forward(m.classifier, z);
}

LatentCode transfer_latent(const LatentCode& z_style, const LatentCode& z_content,
                           const TransferModel& m) {
    auto [f, h_style] = separate(z_style, m);
    auto [f_content, h] = separate(z_content, m);
    return merge(f, h, m);
}

std::vector<double> softmax(std::span<const double> logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - mx);
        sum += out[k];
    }
    for (double& v : out) v /= sum;
    return out;
}

double cross_entropy(std::span<const double> logits, int target) {
    if (target < 0 || target >= static_cast<int>(logits.size()))
        throw std::invalid_argument("cross_entropy: target out of range");
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    return std::log(sum) + mx - logits[target];
}

namespace {

double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
    return acc / static_cast<double>(a.size());
}

// d(mean|a-b|)/da into ga (and -into gb), scaled.
void mean_abs_diff_grad(std::span<const double> a, std::span<const double> b,
                        double scale, std::span<double> ga, std::span<double> gb) {
    const double s = scale / static_cast<double>(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double r = a[k] - b[k];
        const double g = r > 0.0 ? s : (r < 0.0 ? -s : 0.0);
        if (!ga.empty()) ga[k] += g;
        if (!gb.empty()) gb[k] -= g;
    }
}

// CE gradient at the logits: softmax - onehot(target), scaled.
void ce_logit_grad(std::span<const double> logits, int target, double scale,
                   std::span<double> out) {
    const std::vector<double> p = softmax(logits);
    for (std::size_t k = 0; k < p.size(); ++k)
        out[k] += scale * (p[k] - (static_cast<int>(k) == target ? 1.0 : 0.0));
}

}  // namespace

TransferLossComponents transfer_losses(const LatentCode& z_s1c1, const LatentCode& z_s2c2,
                                       const LatentCode& z_s1c2, int c1, int c2,
                                       const TransferModel& m) {
    TransferLossComponents comps;
    auto [f1, h1] = separate(z_s1c1, m);
    auto [f2, h2] = separate(z_s2c2, m);
    auto [f3, h3] = separate(z_s1c2, m);
    comps.cont = mean_abs_diff(h3, h2);
    comps.style = mean_abs_diff(f1, f3);
    const LatentCode zhat = merge(f1, h2, m);
    comps.latent = mean_abs_diff(z_s1c2, zhat);
    comps.cate = cross_entropy(classify_latent(zhat, m), c2);
    comps.c = (cross_entropy(classify_latent(z_s1c1, m), c1) +
               cross_entropy(classify_latent(z_s2c2, m), c2) +
               cross_entropy(classify_latent(z_s1c2, m), c2)) / 3.0;
    return comps;
}

double transfer_losses_grad(const LatentCode& z1, const LatentCode& z2,
                            const LatentCode& z3, int c1, int c2,
                            const TransferModel& m, const TransferLossWeights& w,
                            TransferGrad& grad, TransferLossComponents* components,
                            std::span<const double> zhat_grad_in) {
    const int sd = m.style_dim;
    const int ld = m.latent_dim;

    MlpTrace sep1 = mlp_forward_cached(m.sep, z1);
    MlpTrace sep2 = mlp_forward_cached(m.sep, z2);
    MlpTrace sep3 = mlp_forward_cached(m.sep, z3);
    const auto& o1 = sep1.output();
    const auto& o2 = sep2.output();
    const auto& o3 = sep3.output();
    const std::span<const double> f1(o1.data(), sd), h1(o1.data() + sd, ld - sd);
    const std::span<const double> f2(o2.data(), sd), h2(o2.data() + sd, ld - sd);
    const std::span<const double> f3(o3.data(), sd), h3(o3.data() + sd, ld - sd);

    std::vector<double> concat(ld);
    std::copy(f1.begin(), f1.end(), concat.begin());
    std::copy(h2.begin(), h2.end(), concat.begin() + sd);
    MlpTrace mergeT = mlp_forward_cached(m.merge, concat);
    const std::vector<double>& zhat = mergeT.output();

    MlpTrace cls_hat = mlp_forward_cached(m.classifier, zhat);
    MlpTrace cls1 = mlp_forward_cached(m.classifier, z1);
    MlpTrace cls2 = mlp_forward_cached(m.classifier, z2);
    MlpTrace cls3 = mlp_forward_cached(m.classifier, z3);

    TransferLossComponents comps;
    comps.cont = mean_abs_diff(h3, h2);
    comps.style = mean_abs_diff(f1, f3);
    comps.latent = mean_abs_diff(z3, zhat);
    comps.cate = cross_entropy(cls_hat.output(), c2);
    comps.c = (cross_entropy(cls1.output(), c1) + cross_entropy(cls2.output(), c2) +
               cross_entropy(cls3.output(), c2)) / 3.0;
    if (components) *components = comps;

    // Output-side gradients for each sep pass and for zhat.
    std::vector<double> go1(ld, 0.0), go2(ld, 0.0), go3(ld, 0.0), gzhat(ld, 0.0);
    if (!zhat_grad_in.empty())
        for (int k = 0; k < ld; ++k) gzhat[k] += zhat_grad_in[k];

    mean_abs_diff_grad(h3, h2, w.cont, std::span<double>(go3.data() + sd, ld - sd),
                       std::span<double>(go2.data() + sd, ld - sd));
    mean_abs_diff_grad(f1, f3, w.style, std::span<double>(go1.data(), sd),
                       std::span<double>(go3.data(), sd));
    // L_latent: z3 is a frozen input, only the zhat side propagates.
    mean_abs_diff_grad(z3, zhat, w.latent, {}, gzhat);

    if (w.cate != 0.0) {
        std::vector<double> glog(26, 0.0);
        ce_logit_grad(cls_hat.output(), c2, w.cate, glog);
        std::vector<double> sink(m.classifier.param_count(), 0.0);
        const std::vector<double> dz = mlp_backward(
            m.classifier, cls_hat, glog,
            w.cate_updates_classifier ? std::span<double>(grad.classifier) : std::span<double>(sink));
        for (int k = 0; k < ld; ++k) gzhat[k] += dz[k];
    }
    if (w.c != 0.0) {
        std::vector<double> glog(26);
        auto backprop = [&](MlpTrace& t, int target) {
            std::fill(glog.begin(), glog.end(), 0.0);
            ce_logit_grad(t.output(), target, w.c / 3.0, glog);
            mlp_backward(m.classifier, t, glog, grad.classifier);
        };
        backprop(cls1, c1);
        backprop(cls2, c2);
        backprop(cls3, c2);
    }

    const std::vector<double> dconcat = mlp_backward(m.merge, mergeT, gzhat, grad.merge);
    for (int k = 0; k < sd; ++k) go1[k] += dconcat[k];
    for (int k = sd; k < ld; ++k) go2[k] += dconcat[k];

    mlp_backward(m.sep, sep1, go1, grad.sep);
    mlp_backward(m.sep, sep2, go2, grad.sep);
    mlp_backward(m.sep, sep3, go3, grad.sep);

    return w.cont * comps.cont + w.style * comps.style + w.latent * comps.latent +
           w.cate * comps.cate + w.c * comps.c;
}

TransferResult train_transfer(const FontDataset& data, const LatentTable& table,
                              const DecoderModel& decoder, const TransferConfig& cfg) {
    // Fonts eligible for triplet sampling: training split minus holdouts.
    std::vector<int> fonts;
    for (int fi : data.train) {
        const std::string& name = data.fonts[fi].name;
        bool held = false;
        for (const std::string& h : cfg.holdout_fonts)
            if (h == name) held = true;
        if (!held) fonts.push_back(fi);
    }
    if (fonts.size() < 2)
        throw std::invalid_argument("train_transfer: need at least two non-holdout training fonts");

    // Latent lookup by (font index, char); all sampled glyphs must exist.
    std::vector<const LatentEntry*> lut(data.fonts.size() * 26, nullptr);
    for (const LatentEntry& e : table.entries)
        for (std::size_t fi = 0; fi < data.fonts.size(); ++fi)
            if (data.fonts[fi].name == e.font)
                lut[fi * 26 + e.character] = &e;
    for (int fi : fonts)
        for (int c = 0; c < 26; ++c)
            if (!lut[static_cast<std::size_t>(fi) * 26 + c])
                throw std::invalid_argument("train_transfer: latent table missing glyph " +
                                            data.fonts[fi].name + "/" +
                                            std::string(1, static_cast<char>('A' + c)));

    Rng rng = make_rng(cfg.seed);
    TransferResult result;
    result.model = transfer_init(rng());
    if (decoder.latent_dim != result.model.latent_dim)
        throw std::invalid_argument("train_transfer: decoder latent_dim must be " +
                                    std::to_string(result.model.latent_dim));
    result.model.lambda_cont = cfg.lambda_cont;
    result.model.lambda_style = cfg.lambda_style;
    result.model.lambda_latent = cfg.lambda_latent;
    result.model.lambda_cate = cfg.lambda_cate;
    result.decoder = decoder;
    TransferModel& m = result.model;
    DecoderModel& dec = result.decoder;

    const std::size_t n_sep = m.sep.param_count();
    const std::size_t n_merge = m.merge.param_count();
    const std::size_t n_cls = m.classifier.param_count();
    const std::size_t n_mlp = cfg.finetune_decoder ? dec.mparam.param_count() : 0;
    const std::size_t n_sig = cfg.finetune_decoder ? dec.sigma.size() : 0;
    const std::size_t n_w = cfg.finetune_decoder ? dec.W.size() : 0;
    const std::size_t total = n_sep + n_merge + n_cls + n_mlp + n_sig + n_w;

    std::vector<double> flat(total), gflat(total);
    auto gather = [&] {
        std::size_t off = 0;
        auto put = [&](const std::vector<double>& v) {
            std::copy(v.begin(), v.end(), flat.begin() + off);
            off += v.size();
        };
        put(m.sep.data);
        put(m.merge.data);
        put(m.classifier.data);
        if (cfg.finetune_decoder) {
            put(dec.mparam.data);
            put(dec.sigma);
            put(dec.W);
        }
    };
    auto scatter = [&] {
        std::size_t off = 0;
        auto take = [&](std::vector<double>& v) {
            std::copy(flat.begin() + off, flat.begin() + off + v.size(), v.begin());
            off += v.size();
        };
        take(m.sep.data);
        take(m.merge.data);
        take(m.classifier.data);
        if (cfg.finetune_decoder) {
            take(dec.mparam.data);
            take(dec.sigma);
            take(dec.W);
        }
    };

    AdamConfig acfg;
    acfg.lr = cfg.lr;
    AdamState state(total, acfg);

    // Per-glyph full-pixel batches, built lazily.
    std::vector<SampleBatch> batches(data.fonts.size() * 26);
    auto batch_for = [&](int fi, int c) -> const SampleBatch& {
        SampleBatch& b = batches[static_cast<std::size_t>(fi) * 26 + c];
        if (b.empty()) {
            const RasterImage& img = data.fonts[fi].glyphs[c];
            b = make_batch(img, static_cast<int>(img.pixels.size()), 0);
        }
        return b;
    };

    std::uniform_int_distribution<std::size_t> pick_font(0, fonts.size() - 1);
    std::uniform_int_distribution<int> pick_char(0, 25);
    const double inv_b = 1.0 / cfg.batch_triplets;

    result.trace.reserve(cfg.iterations);
    for (int it = 0; it < cfg.iterations; ++it) {
        std::fill(gflat.begin(), gflat.end(), 0.0);
        TransferGrad tgrad = TransferGrad::zeros(m);
        std::span<double> g_dec_mlp(gflat.data() + n_sep + n_merge + n_cls, n_mlp);
        std::span<double> g_dec_sig(gflat.data() + n_sep + n_merge + n_cls + n_mlp, n_sig);
        std::span<double> g_dec_w(gflat.data() + n_sep + n_merge + n_cls + n_mlp + n_sig, n_w);

        double rec_mean = 0.0, obj_mean = 0.0;
        for (int b = 0; b < cfg.batch_triplets; ++b) {
            const std::size_t a = pick_font(rng);
            std::size_t bb = pick_font(rng);
            while (bb == a) bb = pick_font(rng);
            const int s1 = fonts[a], s2 = fonts[bb];
            const int c1 = pick_char(rng), c2 = pick_char(rng);
            const LatentCode& z1 = lut[static_cast<std::size_t>(s1) * 26 + c1]->z;
            const LatentCode& z2 = lut[static_cast<std::size_t>(s2) * 26 + c2]->z;
            const LatentCode& z3 = lut[static_cast<std::size_t>(s1) * 26 + c2]->z;

            // L_rec on the decoded generated latent vs the (s1,c2) image.
            const LatentCode zhat = transfer_latent(z1, z2, m);
            std::vector<double> g_zhat(m.latent_dim, 0.0);
            const double rec = decode_rec_grad(zhat, dec, batch_for(s1, c2),
                                               g_dec_mlp, g_dec_sig, g_dec_w, g_zhat);
            for (double& g : g_zhat) g *= inv_b;
            // decoder grads were accumulated unscaled; fix up below via inv_b on the whole group
            rec_mean += rec * inv_b;

            TransferLossWeights w;
            w.cont = cfg.lambda_cont * inv_b;
            w.style = cfg.lambda_style * inv_b;
            w.latent = cfg.lambda_latent * inv_b;
            w.cate = cfg.lambda_cate * inv_b;
            w.c = inv_b;
            w.cate_updates_classifier = false;
            TransferLossComponents comps;
            transfer_losses_grad(z1, z2, z3, c1, c2, m, w, tgrad, &comps, g_zhat);
            obj_mean += inv_b * (rec + cfg.lambda_cont * comps.cont +
                                 cfg.lambda_style * comps.style +
                                 cfg.lambda_latent * comps.latent +
                                 cfg.lambda_cate * comps.cate + comps.c);
        }
        for (double& g : g_dec_mlp) g *= inv_b;
        for (double& g : g_dec_sig) g *= inv_b;
        for (double& g : g_dec_w) g *= inv_b;

        double lw = 0.0;
        if (cfg.finetune_decoder) {
            for (std::size_t i = 0; i < n_w; ++i) {
                const double r = dec.W[i] - 1.0;
                lw += std::abs(r);
                if (r > 0.0) g_dec_w[i] += cfg.lambda_w;
                else if (r < 0.0) g_dec_w[i] -= cfg.lambda_w;
            }
        } else {
            lw = loss_w(dec.W);
        }
        const double objective = obj_mean + cfg.lambda_w * lw;
        result.trace.push_back({it, rec_mean, lw, objective});
        if (!std::isfinite(objective)) {
            result.diverged = true;
            return result;
        }

        std::copy(tgrad.sep.begin(), tgrad.sep.end(), gflat.begin());
        std::copy(tgrad.merge.begin(), tgrad.merge.end(), gflat.begin() + n_sep);
        std::copy(tgrad.classifier.begin(), tgrad.classifier.end(), gflat.begin() + n_sep + n_merge);
        gather();
        adam_step(state, flat, gflat);
        scatter();
    }
    return result;
}

RasterImage transfer_one_shot(const RasterImage& style_img, const RasterImage& content_img,
                              const DecoderModel& decoder, const TransferModel& transfer,
                              const InferConfig& infer_cfg, int out_size) {
    const LatentCode z_style = infer_latent(style_img, decoder, infer_cfg);
    const LatentCode z_content = infer_latent(content_img, decoder, infer_cfg);
    const LatentCode zhat = transfer_latent(z_style, z_content, transfer);
    return render_soft(decode(zhat, decoder), out_size, out_size);
}

}  // namespace glyph
