#include "glyph/grad_bundles.hpp"

#include <stdexcept>

namespace glyph {

double decode_rec_grad(const LatentCode& z, const DecoderModel& model,
                       const SampleBatch& batch,
                       std::span<double> g_mlp, std::span<double> g_sigma,
                       std::span<double> g_w, std::span<double> g_z,
                       KinkDistances* kinks) {
    MlpTrace trace = mlp_forward_cached(model.mparam, z);
    GlyphShapeParams work = GlyphShapeParams::zeros(model.v, model.p);
    work.P = trace.output();
    work.sigma = model.sigma;
    work.W = model.W;

    ShapeGrad sgrad = ShapeGrad::zeros(model.v, model.p);
    const double rec = loss_rec_grad(work, batch, sgrad, kinks);

    std::vector<double> scratch;
    std::span<double> mlp_target = g_mlp;
    if (mlp_target.empty()) {
        scratch.assign(model.mparam.param_count(), 0.0);
        mlp_target = scratch;
    } else if (mlp_target.size() != model.mparam.param_count()) {
        throw std::invalid_argument("decode_rec_grad: MLP grad buffer size mismatch");
    }
    const std::vector<double> dz = mlp_backward(model.mparam, trace, sgrad.P, mlp_target);

    if (!g_sigma.empty())
        for (std::size_t k = 0; k < g_sigma.size(); ++k) g_sigma[k] += sgrad.sigma[k];
    if (!g_w.empty())
        for (std::size_t k = 0; k < g_w.size(); ++k) g_w[k] += sgrad.W[k];
    if (!g_z.empty())
        for (std::size_t k = 0; k < g_z.size(); ++k) g_z[k] += dz[k];
    return rec;
}

}  // namespace glyph
