#pragma once

#include <span>
#include <vector>

#include "glyph/fitting.hpp"
#include "glyph/manifold.hpp"

namespace glyph {

// Reconstruction loss through the decoder: z -> M_param -> shape -> L_rec.
// Accumulates gradients for the MLP weights, the global sigma/W, and the
// latent code. Any span may be empty to skip that group.
double decode_rec_grad(const LatentCode& z, const DecoderModel& model,
                       const SampleBatch& batch,
                       std::span<double> g_mlp, std::span<double> g_sigma,
                       std::span<double> g_w, std::span<double> g_z,
                       KinkDistances* kinks = nullptr);

}  // namespace glyph
