#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "glyph/manifold.hpp"
#include "glyph/synthfont.hpp"

using namespace glyph;

namespace {

ManifoldConfig tiny_config() {
    ManifoldConfig cfg;
    cfg.v = 4;
    cfg.p = 2;
    cfg.latent_dim = 8;
    cfg.hidden = 16;
    cfg.iterations = 400;
    cfg.batch_glyphs = 4;
    cfg.lr = 1e-3;
    return cfg;
}

struct TempDataset {
    std::string root = "manifold_test_ds";
    TempDataset(int fonts, int size, int validation) {
        write_dataset(root, fonts, size, validation);
    }
    ~TempDataset() { std::filesystem::remove_all(root); }
};

double smoothed(const std::vector<TraceRow>& trace, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t k = begin; k < end; ++k) acc += trace[k].total;
    return acc / (end - begin);
}

}  // namespace

TEST_CASE("decode maps the latent through the decoder MLP") {
    DecoderModel m;
    m.v = 2;
    m.p = 2;
    m.latent_dim = 4;
    m.mparam = mlp_init({4, 8, 24}, 3);
    m.sigma.assign(4, 1.5);
    m.W = {0.9, 1.1};
    LatentCode z{0.1, -0.2, 0.3, 0.05};
    GlyphShapeParams params = decode(z, m);
    CHECK(params.v == 2);
    CHECK(params.p == 2);
    CHECK(params.P == mlp_forward(m.mparam, z));
    CHECK(params.sigma == m.sigma);
    CHECK(params.W == m.W);
    CHECK_THROWS_AS(decode(LatentCode{0.1, 0.2}, m), std::invalid_argument);
}

TEST_CASE("interpolation endpoints are bit-exact, interior is linear") {
    LatentCode a{1.0, 2.0, 3.0};
    LatentCode b{-1.0, 0.5, 7.0};
    CHECK(interpolate(a, b, 0.0) == a);
    CHECK(interpolate(a, b, 1.0) == b);
    const LatentCode mid = interpolate(a, b, 0.5);
    CHECK(mid[0] == doctest::Approx(0.0));
    CHECK(mid[1] == doctest::Approx(1.25));
    CHECK(mid[2] == doctest::Approx(5.0));
    const LatentCode q = interpolate(a, b, 0.25);
    CHECK(q[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(interpolate(a, LatentCode{1.0}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(a, b, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(a, b, 1.1), std::invalid_argument);
}

TEST_CASE("load_dataset parses the index and honors invert") {
    TempDataset ds(3, 16, 1);
    FontDataset data = load_dataset(ds.root);
    REQUIRE(data.fonts.size() == 3);
    CHECK(data.train.size() == 2);
    CHECK(data.validation.size() == 1);
    for (const FontEntry& f : data.fonts) REQUIRE(f.glyphs.size() == 26);
    CHECK(data.fonts[0].name == "synth00");

    FontDataset flipped = load_dataset(ds.root, true);
    const RasterImage& plain = data.fonts[0].glyphs[0];
    const RasterImage& inv = flipped.fonts[0].glyphs[0];
    for (std::size_t k = 0; k < plain.pixels.size(); ++k)
        CHECK(inv.pixels[k] == doctest::Approx(1.0 - plain.pixels[k]));

    CHECK_THROWS_AS(load_dataset("no_such_dataset_root"), std::runtime_error);

    // Unknown split tags are rejected.
    const std::string bad_root = "manifold_bad_ds";
    std::filesystem::create_directories(bad_root);
    std::ofstream(bad_root + "/index.txt") << "test synth00\n";
    CHECK_THROWS_AS(load_dataset(bad_root), std::runtime_error);
    std::filesystem::remove_all(bad_root);
}

TEST_CASE("auto-decoder training reduces the loss on a tiny dataset") {
    TempDataset ds(2, 16, 0);
    FontDataset data = load_dataset(ds.root);
    ManifoldConfig cfg = tiny_config();
    ManifoldResult res = train_autodecoder(data, cfg);

    CHECK(!res.diverged);
    REQUIRE(res.trace.size() == static_cast<std::size_t>(cfg.iterations));
    CHECK(res.table.size() == 2 * 26);
    CHECK(res.model.mparam.dims == std::vector<int>{8, 16, 6 * 4 * 2});

    // Latents are ordered (font, character) and all present.
    CHECK(res.table.entries[0].font == "synth00");
    CHECK(res.table.entries[0].character == 0);
    CHECK(res.table.find("synth01", 25) != nullptr);

    // Stochastic batches: compare smoothed start vs end.
    const std::size_t w = 50;
    CHECK(smoothed(res.trace, res.trace.size() - w, res.trace.size()) <
          smoothed(res.trace, 0, w));

    // Deterministic for a fixed seed.
    ManifoldResult res2 = train_autodecoder(data, cfg);
    CHECK(res2.model.mparam.data == res.model.mparam.data);
    CHECK(res2.table.entries.back().z == res.table.entries.back().z);

    CHECK_THROWS_AS(train_autodecoder(FontDataset{}, cfg), std::invalid_argument);
}

TEST_CASE("latent inference fits an image better than the zero code") {
    TempDataset ds(2, 16, 0);
    FontDataset data = load_dataset(ds.root);
    ManifoldConfig cfg = tiny_config();
    ManifoldResult res = train_autodecoder(data, cfg);

    const RasterImage& target = data.fonts[0].glyphs[14];  // 'O'
    InferConfig icfg;
    icfg.steps = 200;
    icfg.lr = 1e-2;
    const LatentCode z = infer_latent(target, res.model, icfg);
    REQUIRE(static_cast<int>(z.size()) == cfg.latent_dim);

    const SampleBatch batch = make_batch(target, static_cast<int>(target.pixels.size()), 0);
    const double fitted = loss_rec(decode(z, res.model), batch);
    const double zero = loss_rec(decode(LatentCode(cfg.latent_dim, 0.0), res.model), batch);
    CHECK(fitted < zero + 1e-12);

    // steps = 0 returns the zero code untouched.
    icfg.steps = 0;
    CHECK(infer_latent(target, res.model, icfg) == LatentCode(cfg.latent_dim, 0.0));
}
