#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyph/fitting.hpp"
#include "glyph/kernel.hpp"
#include "glyph/mlp.hpp"
#include "glyph/raster.hpp"

namespace glyph {

using LatentCode = std::vector<double>;  // 256-dim by default

struct LatentEntry {
    std::string font;
    int character = 0;  // 0..25 -> A..Z
    LatentCode z;
};

// Per-glyph latent codes, ordered (font, character) for determinism.
struct LatentTable {
    std::vector<LatentEntry> entries;

    const LatentEntry* find(const std::string& font, int character) const;
    std::size_t size() const { return entries.size(); }
};

// Shared decoder: M_param maps a latent to 6*v*p curve coefficients;
// sigma and W are global learnables shared across glyphs.
struct DecoderModel {
    int v = 16;
    int p = 6;
    int latent_dim = 256;
    MlpWeights mparam;          // latent_dim -> hidden -> 6*v*p
    std::vector<double> sigma;  // v*p
    std::vector<double> W;      // v
};

GlyphShapeParams decode(const LatentCode& z, const DecoderModel& model);

struct FontEntry {
    std::string name;
    std::vector<RasterImage> glyphs;  // 26, A..Z
};

struct FontDataset {
    std::vector<FontEntry> fonts;
    std::vector<int> train;       // indices into fonts
    std::vector<int> validation;
};

// Layout: <root>/<font>/<A..Z>.pgm plus index.txt with
// "train <font>" / "validation <font>" lines. `invert` flips white-on-black
// datasets to the ink=0 convention.
FontDataset load_dataset(const std::string& root, bool invert = false);

struct ManifoldConfig {
    int v = 16;
    int p = 6;
    int latent_dim = 256;
    int hidden = 256;
    int iterations = 60000;
    int batch_glyphs = 32;
    double lr = 1e-4;
    double lambda_w = 0.1;
    double latent_init_std = 0.01;
    std::uint64_t seed = 0;
    FitConfig shape_init{.init_sigma = 1.0};  // v/p/init scales reused for sigma, W init
};

struct ManifoldResult {
    LatentTable table;
    DecoderModel model;
    std::vector<TraceRow> trace;
    bool diverged = false;
};

ManifoldResult train_autodecoder(const FontDataset& data, const ManifoldConfig& cfg);

struct InferConfig {
    int steps = 600;
    double lr = 1e-2;
    double lambda_w = 0.1;
};

LatentCode infer_latent(const RasterImage& img, const DecoderModel& model,
                        const InferConfig& cfg);

LatentCode interpolate(const LatentCode& z1, const LatentCode& z2, double t);

// --- checkpoints ---------------------------------------------------------
// Binary format documented in docs/checkpoint.md.

enum class CheckpointKind : std::uint32_t { Shape = 1, Decoder = 2, Transfer = 3 };

void save_shape_checkpoint(const GlyphShapeParams& params, const std::string& path);
GlyphShapeParams load_shape_checkpoint(const std::string& path);

void save_decoder_checkpoint(const DecoderModel& model, const LatentTable& table,
                             const std::string& path);
void load_decoder_checkpoint(const std::string& path, DecoderModel& model, LatentTable& table);

CheckpointKind probe_checkpoint(const std::string& path);

}  // namespace glyph
