#include "glyph/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "glyph/util.hpp"

namespace glyph {

namespace {

std::size_t layer_offset(const std::vector<int>& dims, int l) {
    std::size_t off = 0;
    for (int k = 0; k < l; ++k)
        off += static_cast<std::size_t>(dims[k + 1]) * dims[k] + dims[k + 1];
    return off;
}

}  // namespace

std::size_t MlpWeights::param_count() const {
    return layer_offset(dims, layer_count());
}

std::span<double> MlpWeights::weight(int l) {
    return {data.data() + layer_offset(dims, l),
            static_cast<std::size_t>(dims[l + 1]) * dims[l]};
}
std::span<const double> MlpWeights::weight(int l) const {
    return {data.data() + layer_offset(dims, l),
            static_cast<std::size_t>(dims[l + 1]) * dims[l]};
}
std::span<double> MlpWeights::bias(int l) {
    return {data.data() + layer_offset(dims, l) + static_cast<std::size_t>(dims[l + 1]) * dims[l],
            static_cast<std::size_t>(dims[l + 1])};
}
std::span<const double> MlpWeights::bias(int l) const {
    return {data.data() + layer_offset(dims, l) + static_cast<std::size_t>(dims[l + 1]) * dims[l],
            static_cast<std::size_t>(dims[l + 1])};
}

MlpWeights mlp_init(const std::vector<int>& dims, std::uint64_t seed, Activation hidden) {
    if (dims.size() < 2) throw std::invalid_argument("mlp_init: need at least input and output dims");
    MlpWeights w;
    w.dims = dims;
    w.hidden = hidden;
    w.data.assign(layer_offset(dims, static_cast<int>(dims.size()) - 1), 0.0);
    Rng rng = make_rng(seed);
    for (int l = 0; l + 1 < static_cast<int>(dims.size()); ++l) {
        const double scale = std::sqrt(2.0 / dims[l]);
        auto ws = w.weight(l);
        for (double& x : ws) x = gaussian(rng, 0.0, scale);
        // biases stay zero
    }
    return w;
}

MlpTrace mlp_forward_cached(const MlpWeights& w, std::span<const double> input) {
    if (static_cast<int>(input.size()) != w.in_dim())
        throw std::invalid_argument("mlp_forward: input length does not match first layer");
    MlpTrace t;
    const int L = w.layer_count();
    t.pre.resize(L);
    t.act.resize(L + 1);
    t.act[0].assign(input.begin(), input.end());
    for (int l = 0; l < L; ++l) {
        const int in = w.dims[l], out = w.dims[l + 1];
        const auto W = w.weight(l);
        const auto b = w.bias(l);
        const std::vector<double>& x = t.act[l];
        std::vector<double>& z = t.pre[l];
        z.resize(out);
        for (int r = 0; r < out; ++r) {
            double acc = b[r];
            const double* row = W.data() + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) acc += row[c] * x[c];
            z[r] = acc;
        }
        std::vector<double>& y = t.act[l + 1];
        y = z;
        if (l + 1 < L && w.hidden == Activation::Relu)
            for (double& v : y) v = v > 0.0 ? v : 0.0;
    }
    return t;
}

std::vector<double> mlp_forward(const MlpWeights& w, std::span<const double> input) {
    return mlp_forward_cached(w, input).output();
}

std::vector<double> mlp_backward(const MlpWeights& w, const MlpTrace& trace,
                                 std::span<const double> output_grad,
                                 std::span<double> grad_data) {
    const int L = w.layer_count();
    if (static_cast<int>(output_grad.size()) != w.out_dim())
        throw std::invalid_argument("mlp_backward: output_grad length mismatch");
    if (grad_data.size() != w.param_count())
        throw std::invalid_argument("mlp_backward: grad buffer size mismatch");

    std::vector<double> delta(output_grad.begin(), output_grad.end());
    for (int l = L - 1; l >= 0; --l) {
        const int in = w.dims[l], out = w.dims[l + 1];
        // ReLU gate on hidden layers (output layer is linear)
        if (l != L - 1 && w.hidden == Activation::Relu)
            for (int r = 0; r < out; ++r)
                if (trace.pre[l][r] <= 0.0) delta[r] = 0.0;

        const std::size_t off = static_cast<std::size_t>(w.weight(l).data() - w.data.data());
        double* gW = grad_data.data() + off;
        double* gb = gW + static_cast<std::size_t>(out) * in;
        const std::vector<double>& x = trace.act[l];
        const auto W = w.weight(l);

        std::vector<double> dx(in, 0.0);
        for (int r = 0; r < out; ++r) {
            const double dr = delta[r];
            gb[r] += dr;
            double* gRow = gW + static_cast<std::size_t>(r) * in;
            const double* wRow = W.data() + static_cast<std::size_t>(r) * in;
            if (dr != 0.0) {
                for (int c = 0; c < in; ++c) {
                    gRow[c] += dr * x[c];
                    dx[c] += dr * wRow[c];
                }
            }
        }
        delta = std::move(dx);
    }
    return delta;
}

}  // namespace glyph
