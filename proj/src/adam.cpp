#include "glyph/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace glyph {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
    if (params.size() != state.m.size() || grads.size() != params.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::domain_error("adam_step: non-finite gradient");

    state.step += 1;
    const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        state.m[k] = b1 * state.m[k] + (1.0 - b1) * grads[k];
        state.v[k] = b2 * state.v[k] + (1.0 - b2) * grads[k] * grads[k];
        const double mhat = state.m[k] / bc1;
        const double vhat = state.v[k] / bc2;
        params[k] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
    }
}

}  // namespace glyph
