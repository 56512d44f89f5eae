#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace glyph {

enum class Activation { Linear, Relu };

// Dense feed-forward network. Weights for all layers live in one flat
// buffer so optimizers and checkpoints can treat the net as a single
// parameter vector. Hidden layers use `hidden` activation, the output
// layer is linear.
struct MlpWeights {
    std::vector<int> dims;       // dims.size() >= 2
    Activation hidden = Activation::Relu;
    std::vector<double> data;    // concatenated [W0, b0, W1, b1, ...]

    int layer_count() const { return static_cast<int>(dims.size()) - 1; }
    int in_dim() const { return dims.front(); }
    int out_dim() const { return dims.back(); }
    std::size_t param_count() const;

    // Row-major (out x in) weight matrix of layer l, then its bias.
    std::span<double> weight(int l);
    std::span<const double> weight(int l) const;
    std::span<double> bias(int l);
    std::span<const double> bias(int l) const;
};

// He-initialized weights (Gaussian, stddev sqrt(2/fan_in)), zero biases.
MlpWeights mlp_init(const std::vector<int>& dims, std::uint64_t seed,
                    Activation hidden = Activation::Relu);

std::vector<double> mlp_forward(const MlpWeights& w, std::span<const double> input);

// Per-layer activations cached by mlp_forward_cached for backprop.
struct MlpTrace {
    std::vector<std::vector<double>> pre;   // pre-activation per layer
    std::vector<std::vector<double>> act;   // act[0] = input, act[l+1] = output of layer l
    const std::vector<double>& output() const { return act.back(); }
};

MlpTrace mlp_forward_cached(const MlpWeights& w, std::span<const double> input);

// Reverse pass: given dL/d(output), accumulates dL/d(weights) into
// grad_data (same layout as w.data) and returns dL/d(input).
std::vector<double> mlp_backward(const MlpWeights& w, const MlpTrace& trace,
                                 std::span<const double> output_grad,
                                 std::span<double> grad_data);

}  // namespace glyph
