#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "glyph/synthfont.hpp"
#include "glyph/transfer.hpp"
#include "glyph/util.hpp"

using namespace glyph;

namespace {

LatentCode random_latent(Rng& rng, int dim = 256) {
    LatentCode z(dim);
    for (double& x : z) x = gaussian(rng, 0.0, 0.3);
    return z;
}

struct TempDataset {
    std::string root = "transfer_test_ds";
    TempDataset(int fonts, int size) { write_dataset(root, fonts, size, 0); }
    ~TempDataset() { std::filesystem::remove_all(root); }
};

// Tiny decoder over the full 256-dim latent space the transfer head expects.
DecoderModel tiny_decoder(std::uint64_t seed) {
    DecoderModel m;
    m.v = 4;
    m.p = 2;
    m.latent_dim = 256;
    m.mparam = mlp_init({256, 16, 6 * 4 * 2}, seed);
    m.sigma.assign(8, 1.0);
    m.W.assign(4, 1.0);
    return m;
}

LatentTable full_table(const FontDataset& data, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    LatentTable t;
    for (const FontEntry& f : data.fonts)
        for (int c = 0; c < 26; ++c) {
            LatentEntry e;
            e.font = f.name;
            e.character = c;
            e.z = random_latent(rng);
            t.entries.push_back(std::move(e));
        }
    return t;
}

}  // namespace

TEST_CASE("separate and merge have the documented shapes") {
    TransferModel m = transfer_init(5);
    CHECK(m.sep.dims == std::vector<int>{256, 256, 256});
    CHECK(m.merge.dims == std::vector<int>{256, 256, 256, 256});
    CHECK(m.classifier.dims == std::vector<int>{256, 256, 26});

    Rng rng = make_rng(9);
    const LatentCode z = random_latent(rng);
    auto [f, h] = separate(z, m);
    CHECK(f.size() == 128);
    CHECK(h.size() == 128);
    // separate is a split of the sep MLP output.
    const std::vector<double> raw = mlp_forward(m.sep, z);
    for (int k = 0; k < 128; ++k) {
        CHECK(f[k] == raw[k]);
        CHECK(h[k] == raw[128 + k]);
    }
    CHECK(merge(f, h, m).size() == 256);
    CHECK(classify_latent(z, m).size() == 26);
}

TEST_CASE("transfer_latent merges style of one latent with content of another") {
    TransferModel m = transfer_init(7);
    Rng rng = make_rng(11);
    const LatentCode z_style = random_latent(rng);
    const LatentCode z_content = random_latent(rng);
    auto [f_style, h_style] = separate(z_style, m);
    auto [f_content, h_content] = separate(z_content, m);
    CHECK(transfer_latent(z_style, z_content, m) == merge(f_style, h_content, m));
    // Self-transfer is merge of a latent's own parts.
    CHECK(transfer_latent(z_style, z_style, m) == merge(f_style, h_style, m));
}

TEST_CASE("loss components agree between plain and gradient evaluation") {
    TransferModel m = transfer_init(13);
    Rng rng = make_rng(15);
    const LatentCode z1 = random_latent(rng);
    const LatentCode z2 = random_latent(rng);
    const LatentCode z3 = random_latent(rng);

    const TransferLossComponents plain = transfer_losses(z1, z2, z3, 1, 2, m);
    TransferLossWeights w;
    w.cont = 1.0; w.style = 1.0; w.latent = 1.0; w.cate = 1.0; w.c = 1.0;
    TransferGrad g = TransferGrad::zeros(m);
    TransferLossComponents from_grad;
    const double total = transfer_losses_grad(z1, z2, z3, 1, 2, m, w, g, &from_grad);
    CHECK(from_grad.cont == doctest::Approx(plain.cont));
    CHECK(from_grad.style == doctest::Approx(plain.style));
    CHECK(from_grad.latent == doctest::Approx(plain.latent));
    CHECK(from_grad.cate == doctest::Approx(plain.cate));
    CHECK(from_grad.c == doctest::Approx(plain.c));
    CHECK(total == doctest::Approx(plain.cont + plain.style + plain.latent +
                                   plain.cate + plain.c));
}

TEST_CASE("transfer training runs, is deterministic and excludes holdouts") {
    TempDataset ds(3, 16);
    FontDataset data = load_dataset(ds.root);
    DecoderModel decoder = tiny_decoder(21);
    LatentTable table = full_table(data, 23);

    TransferConfig cfg;
    cfg.iterations = 30;
    cfg.batch_triplets = 2;
    cfg.lr = 1e-3;
    cfg.finetune_decoder = true;

    TransferResult a = train_transfer(data, table, decoder, cfg);
    CHECK(!a.diverged);
    REQUIRE(a.trace.size() == 30);
    for (const TraceRow& row : a.trace) CHECK(std::isfinite(row.total));

    TransferResult b = train_transfer(data, table, decoder, cfg);
    CHECK(a.model.sep.data == b.model.sep.data);
    CHECK(a.decoder.mparam.data == b.decoder.mparam.data);

    // Frozen decoder stays bit-identical.
    cfg.finetune_decoder = false;
    TransferResult frozen = train_transfer(data, table, decoder, cfg);
    CHECK(frozen.decoder.mparam.data == decoder.mparam.data);
    CHECK(frozen.decoder.sigma == decoder.sigma);

    // Holding out all but one font leaves too few for triplets.
    cfg.holdout_fonts = {"synth00", "synth01"};
    CHECK_THROWS_AS(train_transfer(data, table, decoder, cfg), std::invalid_argument);

    // Missing latent entries are rejected up front.
    LatentTable partial = table;
    partial.entries.pop_back();
    cfg.holdout_fonts.clear();
    CHECK_THROWS_AS(train_transfer(data, partial, decoder, cfg), std::invalid_argument);
}

TEST_CASE("one-shot transfer renders a well-formed image") {
    TempDataset ds(2, 16);
    FontDataset data = load_dataset(ds.root);
    DecoderModel decoder = tiny_decoder(31);
    TransferModel transfer = transfer_init(33);
    InferConfig icfg;
    icfg.steps = 5;
    const RasterImage out = transfer_one_shot(data.fonts[0].glyphs[0], data.fonts[1].glyphs[1],
                                              decoder, transfer, icfg, 24);
    CHECK(out.width == 24);
    CHECK(out.height == 24);
    for (double p : out.pixels) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}
