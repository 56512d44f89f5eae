#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace glyph {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    std::int64_t step = 0;
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment

    explicit AdamState(std::size_t n, AdamConfig cfg = {})
        : cfg(cfg), m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected Adam update, in place. Throws std::domain_error on
// non-finite gradients.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace glyph
