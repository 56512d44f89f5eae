#pragma once

#include <functional>
#include <span>
#include <vector>

namespace glyph {

// Finite-difference verification harness for analytic gradients.
//
// `loss` evaluates the scalar objective at the current parameter values;
// the harness perturbs params[k] by +/-h around its base value for each
// checked coordinate and compares the central difference against
// analytic[k]. Relative error uses max(1, |fd|) as denominator.
struct FdCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
};

FdCheckResult fd_check(const std::function<double()>& loss,
                       std::span<double> params,
                       std::span<const double> analytic,
                       std::span<const std::size_t> indices,
                       double h = 1e-5);

// Check every coordinate.
FdCheckResult fd_check_all(const std::function<double()>& loss,
                           std::span<double> params,
                           std::span<const double> analytic,
                           double h = 1e-5);

}  // namespace glyph
