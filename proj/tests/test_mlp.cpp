#include <doctest.h>

#include <cmath>
#include <vector>

#include "glyph/grad_check.hpp"
#include "glyph/mlp.hpp"
#include "glyph/util.hpp"

using namespace glyph;

TEST_CASE("forward pass on a hand-built two-layer net") {
    MlpWeights w;
    w.dims = {2, 2, 1};
    w.hidden = Activation::Relu;
    w.data.assign(w.param_count(), 0.0);
    // Layer 0: W = [[1, -1], [2, 0]], b = [0.5, -3].
    auto w0 = w.weight(0);
    w0[0] = 1.0; w0[1] = -1.0; w0[2] = 2.0; w0[3] = 0.0;
    w.bias(0)[0] = 0.5;
    w.bias(0)[1] = -3.0;
    // Layer 1: W = [[3, 4]], b = [1].
    w.weight(1)[0] = 3.0;
    w.weight(1)[1] = 4.0;
    w.bias(1)[0] = 1.0;

    // Input (1, 2): pre0 = (1-2+0.5, 2-3) = (-0.5, -1) -> relu (0, 0) -> out 1.
    CHECK(mlp_forward(w, std::vector<double>{1.0, 2.0})[0] == doctest::Approx(1.0));
    // Input (2, 1): pre0 = (1.5, 1) -> out = 3*1.5 + 4*1 + 1 = 9.5.
    CHECK(mlp_forward(w, std::vector<double>{2.0, 1.0})[0] == doctest::Approx(9.5));
}

TEST_CASE("param_count and layout accessors agree") {
    MlpWeights w = mlp_init({3, 5, 7, 2}, 1);
    CHECK(w.param_count() == 3 * 5 + 5 + 5 * 7 + 7 + 7 * 2 + 2);
    CHECK(w.data.size() == w.param_count());
    CHECK(w.weight(0).size() == 15);
    CHECK(w.bias(0).size() == 5);
    CHECK(w.weight(2).size() == 14);
    CHECK(w.bias(2).size() == 2);
    CHECK(w.layer_count() == 3);
}

TEST_CASE("he init: zero biases, seed-reproducible, roughly scaled weights") {
    MlpWeights a = mlp_init({64, 64}, 7);
    MlpWeights b = mlp_init({64, 64}, 7);
    CHECK(a.data == b.data);
    for (double x : a.bias(0)) CHECK(x == 0.0);
    double ss = 0.0;
    for (double x : a.weight(0)) ss += x * x;
    const double var = ss / a.weight(0).size();
    CHECK(var == doctest::Approx(2.0 / 64).epsilon(0.25));
    MlpWeights c = mlp_init({64, 64}, 8);
    CHECK(a.data != c.data);
}

TEST_CASE("cached forward matches plain forward") {
    MlpWeights w = mlp_init({4, 8, 8, 3}, 2);
    Rng rng = make_rng(3);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> in(4);
        for (double& x : in) x = gaussian(rng, 0.0, 1.0);
        const auto out = mlp_forward(w, in);
        const auto trace = mlp_forward_cached(w, in);
        REQUIRE(out.size() == 3);
        for (int k = 0; k < 3; ++k) CHECK(out[k] == doctest::Approx(trace.output()[k]));
    }
}

TEST_CASE("backward gradients match finite differences") {
    MlpWeights w = mlp_init({3, 6, 5, 2}, 4);
    Rng rng = make_rng(5);
    std::vector<double> in(3);
    // Finite differences are only valid away from ReLU kinks; resample the
    // input until every pre-activation is clear of zero.
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (double& x : in) x = gaussian(rng, 0.0, 1.0);
        const auto t = mlp_forward_cached(w, in);
        double kink = 1e300;
        for (const auto& layer : t.pre)
            for (double v : layer) kink = std::min(kink, std::abs(v));
        if (kink > 1e-3) break;
    }
    std::vector<double> target{0.3, -0.7};

    auto loss_fn = [&]() {
        const auto out = mlp_forward(w, in);
        double l = 0.0;
        for (int k = 0; k < 2; ++k) l += (out[k] - target[k]) * (out[k] - target[k]);
        return l;
    };

    const auto trace = mlp_forward_cached(w, in);
    std::vector<double> out_grad(2);
    for (int k = 0; k < 2; ++k) out_grad[k] = 2.0 * (trace.output()[k] - target[k]);
    std::vector<double> g(w.param_count(), 0.0);
    const auto in_grad = mlp_backward(w, trace, out_grad, g);

    const auto res = fd_check_all(loss_fn, w.data, g, 1e-6);
    CHECK(res.max_rel_error < 1e-6);

    // Input gradient too.
    const auto res_in = fd_check_all(loss_fn, in, in_grad, 1e-6);
    CHECK(res_in.max_rel_error < 1e-6);
}

TEST_CASE("backward accumulates instead of overwriting") {
    MlpWeights w = mlp_init({2, 3, 1}, 6);
    std::vector<double> in{0.5, -0.25};
    const auto trace = mlp_forward_cached(w, in);
    std::vector<double> og{1.0};
    std::vector<double> g1(w.param_count(), 0.0);
    mlp_backward(w, trace, og, g1);
    std::vector<double> g2(g1);
    mlp_backward(w, trace, og, g2);
    for (std::size_t k = 0; k < g1.size(); ++k) CHECK(g2[k] == doctest::Approx(2.0 * g1[k]));
}
