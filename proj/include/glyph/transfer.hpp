#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyph/manifold.hpp"
#include "glyph/mlp.hpp"

namespace glyph {

using StyleVector = std::vector<double>;    // 128
using ContentVector = std::vector<double>;  // 128

// Style/content head on latent codes: M_sep splits a latent into
// (style, content), M_merge recombines, and a latent classifier guards
// the character identity of merged codes.
struct TransferModel {
    int latent_dim = 256;
    int style_dim = 128;
    MlpWeights sep;         // 256 -> 256 -> 256, output split 128 + 128
    MlpWeights merge;       // 256 -> 256 -> 256 -> 256
    MlpWeights classifier;  // 256 -> ... -> 26 logits
    double lambda_cont = 0.1;
    double lambda_style = 0.1;
    double lambda_latent = 0.1;
    double lambda_cate = 0.05;
};

TransferModel transfer_init(std::uint64_t seed);

std::pair<StyleVector, ContentVector> separate(const LatentCode& z, const TransferModel& m);
LatentCode merge(const StyleVector& f, const ContentVector& h, const TransferModel& m);
std::vector<double> classify_latent(const LatentCode& z, const TransferModel& m);

// merge(f(style), h(content)) — the generated latent.
LatentCode transfer_latent(const LatentCode& z_style, const LatentCode& z_content,
                           const TransferModel& m);

std::vector<double> softmax(std::span<const double> logits);
double cross_entropy(std::span<const double> logits, int target);

struct TransferLossComponents {
    double cont = 0.0;
    double style = 0.0;
    double latent = 0.0;
    double cate = 0.0;
    double c = 0.0;
};

// The triplet corresponds to glyphs (s1,c1), (s2,c2), (s1,c2); c1/c2 are
// character indices for the classifier terms.
TransferLossComponents transfer_losses(const LatentCode& z_s1c1, const LatentCode& z_s2c2,
                                       const LatentCode& z_s1c2, int c1, int c2,
                                       const TransferModel& m);

struct TransferGrad {
    std::vector<double> sep;
    std::vector<double> merge;
    std::vector<double> classifier;

    static TransferGrad zeros(const TransferModel& m);
};

struct TransferLossWeights {
    double cont = 0.0;
    double style = 0.0;
    double latent = 0.0;
    double cate = 0.0;
    double c = 0.0;
    // Training detaches the classifier from L_cate (it is supervised by
    // L_c alone); the true derivative is kept for gradient checking.
    bool cate_updates_classifier = true;
};

// Weighted sum of the latent-space losses with analytic gradients w.r.t.
// the transfer MLPs. L_rec is handled separately via decode_rec_grad.
double transfer_losses_grad(const LatentCode& z_s1c1, const LatentCode& z_s2c2,
                            const LatentCode& z_s1c2, int c1, int c2,
                            const TransferModel& m, const TransferLossWeights& w,
                            TransferGrad& grad, TransferLossComponents* components = nullptr,
                            std::span<const double> zhat_grad_in = {});

struct TransferConfig {
    int iterations = 6000;
    int batch_triplets = 16;
    double lr = 1e-4;
    double lambda_w = 0.1;
    double lambda_cont = 0.1;
    double lambda_style = 0.1;
    double lambda_latent = 0.1;
    double lambda_cate = 0.05;
    bool finetune_decoder = true;
    std::uint64_t seed = 0;
    // Fonts excluded from triplet sampling (still in the latent table);
    // used as held-out content references for evaluation.
    std::vector<std::string> holdout_fonts;
};

struct TransferResult {
    TransferModel model;
    DecoderModel decoder;  // fine-tuned copy (identical to input when frozen)
    std::vector<TraceRow> trace;  // rec in .rec, full objective in .total
    bool diverged = false;
};

TransferResult train_transfer(const FontDataset& data, const LatentTable& table,
                              const DecoderModel& decoder, const TransferConfig& cfg);

// One-shot generation at the latent level plus rendering.
RasterImage transfer_one_shot(const RasterImage& style_img, const RasterImage& content_img,
                              const DecoderModel& decoder, const TransferModel& transfer,
                              const InferConfig& infer_cfg, int out_size);

// --- checkpoint ----------------------------------------------------------
void save_transfer_checkpoint(const DecoderModel& decoder, const LatentTable& table,
                              const TransferModel& transfer, const std::string& path);
void load_transfer_checkpoint(const std::string& path, DecoderModel& decoder,
                              LatentTable& table, TransferModel& transfer);

}  // namespace glyph
